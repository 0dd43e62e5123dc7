#include "cliquecop/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cliquecop {

using nlohmann::ordered_json;

namespace {

std::vector<Triplet> read_triplets(const ordered_json& arr, Index n,
                                   const std::string& where) {
  std::vector<Triplet> out;
  if (!arr.is_array())
    throw ParseError(where + ": expected an array of [i, j, value] triplets");
  for (std::size_t e = 0; e < arr.size(); ++e) {
    const auto& t = arr[e];
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() ||
        !t[1].is_number_integer() || !t[2].is_number())
      throw ParseError(where + ": entry " + std::to_string(e + 1) +
                       " is not [i, j, value]");
    Index i = t[0].get<Index>();
    Index j = t[1].get<Index>();
    double v = t[2].get<double>();
    if (i < 1 || i > n || j < 1 || j > n)
      throw ParseError(where + ": entry " + std::to_string(e + 1) + " index (" +
                       std::to_string(i) + "," + std::to_string(j) +
                       ") outside [1," + std::to_string(n) + "]");
    if (i > j) std::swap(i, j);
    out.push_back({i, j, v});
  }
  return out;
}

SparseSymMatrix read_matrix(const ordered_json& arr, Index n,
                            const std::string& where) {
  auto triplets = read_triplets(arr, n, where);
  try {
    return SparseSymMatrix(n, triplets);
  } catch (const std::invalid_argument& ex) {
    throw ParseError(where + ": " + ex.what());
  }
}

ordered_json matrix_to_json(const SparseSymMatrix& m) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : m.entries()) arr.push_back({t.i, t.j, t.v});
  return arr;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

InstanceFile parse_instance_text(const std::string& text,
                                 const std::string& origin) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(origin + ": " + ex.what());
  }
  if (!doc.is_object()) throw ParseError(origin + ": top level is not an object");
  int schema = doc.value("schema", 1);
  if (schema != 1)
    throw ParseError(origin + ": unsupported schema version " +
                     std::to_string(schema));
  if (!doc.contains("n") || !doc["n"].is_number_integer())
    throw ParseError(origin + ": missing integer field 'n'");
  Index n = doc["n"].get<Index>();
  if (n < 1) throw ParseError(origin + ": n must be positive");

  SparseSymMatrix objective(n);
  if (doc.contains("objective"))
    objective = read_matrix(doc["objective"], n, origin + ": objective");

  auto read_group = [&](const char* key) {
    std::vector<Constraint> out;
    if (!doc.contains(key)) return out;
    const auto& arr = doc[key];
    if (!arr.is_array())
      throw ParseError(origin + ": '" + key + "' is not an array");
    for (const auto& item : arr) {
      if (!item.is_object() || !item.contains("id") ||
          !item["id"].is_number_integer() || !item.contains("entries"))
        throw ParseError(origin + ": each " + key +
                         " constraint needs an integer 'id' and 'entries'");
      int id = item["id"].get<int>();
      out.push_back({id, read_matrix(item["entries"], n,
                                     origin + ": constraint " +
                                         std::to_string(id))});
    }
    return out;
  };
  auto eq = read_group("eq");
  auto ineq = read_group("ineq");

  std::optional<SparsityGraph> pattern;
  if (doc.contains("pattern")) {
    const auto& arr = doc["pattern"];
    if (!arr.is_array())
      throw ParseError(origin + ": 'pattern' is not an array of edges");
    SparsityGraph g(n);
    for (const auto& e : arr) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
          !e[1].is_number_integer())
        throw ParseError(origin + ": pattern edges must be [i, j]");
      Index i = e[0].get<Index>(), j = e[1].get<Index>();
      if (i < 1 || i > n || j < 1 || j > n || i == j)
        throw ParseError(origin + ": pattern edge (" + std::to_string(i) + "," +
                         std::to_string(j) + ") is invalid");
      g.add_edge(i, j);
    }
    pattern = std::move(g);
  }

  InstanceFile inst{schema,
                    doc.value("name", std::string{}),
                    doc.value("source", std::string{}),
                    ConicProblem(n, std::move(objective), std::move(eq),
                                 std::move(ineq)),
                    std::move(pattern)};
  return inst;
}

InstanceFile parse_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance_text(ss.str(), path);
}

std::string instance_to_json(const InstanceFile& inst) {
  ordered_json doc;
  doc["schema"] = inst.schema;
  if (!inst.name.empty()) doc["name"] = inst.name;
  if (!inst.source.empty()) doc["source"] = inst.source;
  doc["n"] = inst.problem.n();
  doc["objective"] = matrix_to_json(inst.problem.objective());
  ordered_json eq = ordered_json::array();
  for (const auto& c : inst.problem.eq_constraints())
    eq.push_back({{"id", c.id}, {"entries", matrix_to_json(c.matrix)}});
  doc["eq"] = eq;
  ordered_json ineq = ordered_json::array();
  for (const auto& c : inst.problem.ineq_constraints())
    ineq.push_back({{"id", c.id}, {"entries", matrix_to_json(c.matrix)}});
  doc["ineq"] = ineq;
  if (inst.pattern) {
    ordered_json edges = ordered_json::array();
    for (auto [i, j] : inst.pattern->edges()) edges.push_back({i, j});
    doc["pattern"] = edges;
  }
  return doc.dump(2) + "\n";
}

void write_instance(const InstanceFile& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << instance_to_json(inst);
}

}  // namespace cliquecop
