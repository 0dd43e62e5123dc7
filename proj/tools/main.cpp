// Command-line front end: analyze, extend, decompose, solve, certify and
// oracle over COP instance files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cliquecop/clique_solver.hpp"
#include "cliquecop/io.hpp"

namespace cc = cliquecop;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUnbounded = 3;
constexpr int kExitUncertified = 4;

struct CommonOpts {
  std::string path;
  std::string format = "text";
  bool json() const { return format == "json"; }
};

unsigned resolve_seed(unsigned cli_seed) {
  if (const char* env = std::getenv("COP_SEED")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (...) {
      throw cc::ParseError("COP_SEED is not an unsigned integer");
    }
  }
  return cli_seed;
}

ordered_json tolerances_json(const cc::SolverConfig& cfg) {
  return {{"eps_feas", cfg.eps_feas},
          {"eps_opt", cfg.eps_opt},
          {"eps_cone", cfg.eps_cone},
          {"unbounded_tol", cfg.unbounded_tol},
          {"max_iter", cfg.max_iter},
          {"seed", cfg.seed}};
}

void print_tolerances(const cc::SolverConfig& cfg) {
  std::cout << "tolerances: eps_feas=" << cc::format_real(cfg.eps_feas)
            << " eps_opt=" << cc::format_real(cfg.eps_opt)
            << " eps_cone=" << cc::format_real(cfg.eps_cone)
            << " unbounded_tol=" << cc::format_real(cfg.unbounded_tol)
            << " seed=" << cfg.seed << "\n";
}

std::string clique_to_string(const std::vector<cc::Index>& c) {
  std::string s = "{";
  for (std::size_t i = 0; i < c.size(); ++i)
    s += (i ? "," : "") + std::to_string(c[i]);
  return s + "}";
}

ordered_json plan_to_json(const cc::DecompositionPlan& plan) {
  ordered_json out;
  ordered_json agg = ordered_json::array();
  for (auto [i, j] : plan.aggregated.edges()) agg.push_back({i, j});
  out["aggregated_edges"] = agg;
  out["from_pattern"] = plan.from_pattern;
  auto chord = cc::is_chordal(plan.effective);
  out["chordal"] = chord.chordal;
  out["block_clique"] = cc::is_block_clique(plan.effective);
  ordered_json comps = ordered_json::array();
  for (const auto& part : plan.components) {
    ordered_json pc;
    pc["nodes"] = part.nodes;
    pc["contains_node_1"] = part.contains_root;
    pc["extended"] = part.extended;
    ordered_json cliques = ordered_json::array();
    for (int r = 1; r <= part.tree.size(); ++r) {
      ordered_json cq;
      cq["r"] = r;
      cq["nodes"] = part.tree.clique(r);
      if (r >= 2) {
        cq["parent"] = part.tree.parent.at(r);
        cq["anchor"] = part.tree.anchor.at(r);
      }
      cliques.push_back(cq);
    }
    pc["cliques"] = cliques;
    comps.push_back(pc);
  }
  out["components"] = comps;
  return out;
}

void print_plan(const cc::DecompositionPlan& plan) {
  auto chord = cc::is_chordal(plan.effective);
  std::cout << "aggregated edges: " << plan.aggregated.edge_count() << "\n";
  std::cout << "pattern source: "
            << (plan.from_pattern ? "explicit pattern field" : "aggregated")
            << "\n";
  std::cout << "chordal: " << (chord.chordal ? "yes" : "no")
            << "   block-clique: "
            << (cc::is_block_clique(plan.effective) ? "yes" : "no") << "\n";
  for (const auto& part : plan.components) {
    std::cout << "component " << clique_to_string(part.nodes)
              << (part.contains_root ? " (contains node 1)" : "")
              << (part.extended ? " [extended]" : "") << "\n";
    for (int r = 1; r <= part.tree.size(); ++r) {
      std::cout << "  C" << r << " = "
                << clique_to_string(part.tree.clique(r));
      if (r >= 2)
        std::cout << "  parent C" << part.tree.parent.at(r) << "  anchor k_"
                  << r << " = " << part.tree.anchor.at(r);
      std::cout << "\n";
    }
  }
}

int run_analyze(const CommonOpts& opts, bool auto_extend) {
  auto inst = cc::parse_instance(opts.path);
  auto plan = cc::plan_decomposition(inst.problem, inst.pattern, auto_extend);
  if (opts.json()) {
    ordered_json out = plan_to_json(plan);
    out["name"] = inst.name;
    out["n"] = inst.problem.n();
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "instance: " << (inst.name.empty() ? opts.path : inst.name)
              << " (n=" << inst.problem.n()
              << ", eq=" << inst.problem.eq_constraints().size()
              << ", ineq=" << inst.problem.ineq_constraints().size() << ")\n";
    print_plan(plan);
  }
  return kExitOk;
}

int run_extend(const CommonOpts& opts, const std::string& output) {
  auto inst = cc::parse_instance(opts.path);
  cc::SparsityGraph base =
      inst.pattern ? *inst.pattern : cc::aggregated_sparsity(inst.problem);
  cc::SparsityGraph extended(base.n());
  for (const auto& comp : base.components()) {
    cc::SparsityGraph local(base.n());
    for (cc::Index v : comp)
      for (cc::Index w : base.neighbors(v))
        if (v < w) local.add_edge(v, w);
    // Complete each biconnected block of the component.
    for (const auto& block : cc::biconnected_components(local))
      for (std::size_t a = 0; a < block.size(); ++a)
        for (std::size_t b = a + 1; b < block.size(); ++b)
          extended.add_edge(block[a], block[b]);
  }
  cc::InstanceFile out = inst;
  out.pattern = extended;
  if (!out.name.empty()) out.name += "-extended";
  if (output.empty())
    std::cout << cc::instance_to_json(out);
  else {
    cc::write_instance(out, output);
    std::cout << "extended instance written to " << output << "\n";
  }
  return kExitOk;
}

int run_decompose(const CommonOpts& opts, const std::string& out_dir,
                  bool auto_extend) {
  auto inst = cc::parse_instance(opts.path);
  auto plan = cc::plan_decomposition(inst.problem, inst.pattern, auto_extend);
  std::filesystem::create_directories(out_dir);
  int file_index = 0;
  for (const auto& part : plan.components) {
    for (int r = 1; r <= part.tree.size(); ++r) {
      const auto& sub = part.dp.subproblems[static_cast<std::size_t>(r) - 1];
      ordered_json doc;
      doc["clique"] = sub.clique;
      doc["anchor"] = sub.anchor;
      if (r >= 2) doc["parent"] = part.tree.parent.at(r);
      ordered_json obj = ordered_json::array();
      const auto& split =
          part.dp.split.per_clique[static_cast<std::size_t>(r) - 1];
      for (const auto& t : split.entries()) obj.push_back({t.i, t.j, t.v});
      doc["objective"] = obj;
      auto dump_group = [&](const std::vector<cc::LocalConstraint>& group) {
        ordered_json arr = ordered_json::array();
        for (const auto& c : group) {
          ordered_json entries = ordered_json::array();
          for (cc::Index a = 0; a < sub.size(); ++a)
            for (cc::Index b = a; b < sub.size(); ++b)
              if (c.matrix(a, b) != 0.0)
                entries.push_back({sub.clique[static_cast<std::size_t>(a)],
                                   sub.clique[static_cast<std::size_t>(b)],
                                   c.matrix(a, b)});
          arr.push_back({{"id", c.id}, {"entries", entries}});
        }
        return arr;
      };
      doc["eq"] = dump_group(sub.eq);
      doc["ineq"] = dump_group(sub.ineq);
      ++file_index;
      std::string path =
          out_dir + "/clique_" + std::to_string(file_index) + ".json";
      std::ofstream f(path);
      f << doc.dump(2) << "\n";
      std::cout << "wrote " << path << "  clique "
                << clique_to_string(sub.clique) << "\n";
    }
  }
  return kExitOk;
}

ordered_json report_to_json(const cc::SolveReport& report,
                            const cc::SolverConfig& cfg) {
  ordered_json out;
  switch (report.status) {
    case cc::GlobalStatus::Optimal: out["status"] = "optimal"; break;
    case cc::GlobalStatus::Infeasible: out["status"] = "infeasible"; break;
    case cc::GlobalStatus::Unbounded: out["status"] = "unbounded"; break;
  }
  if (report.status == cc::GlobalStatus::Optimal)
    out["value"] = cc::format_real(report.value);
  out["heuristic"] = report.heuristic;
  ordered_json blocks = ordered_json::array();
  for (const auto& b : report.blocks) {
    ordered_json jb;
    jb["clique"] = b.clique;
    jb["objective_contribution"] = cc::format_real(b.objective_contribution);
    ordered_json rows = ordered_json::array();
    for (cc::Index i = 0; i < b.size(); ++i) {
      ordered_json row = ordered_json::array();
      for (cc::Index j = 0; j < b.size(); ++j)
        row.push_back(cc::format_real(b.block(i, j)));
      rows.push_back(row);
    }
    jb["block"] = rows;
    blocks.push_back(jb);
  }
  out["blocks"] = blocks;
  out["tolerances"] = tolerances_json(cfg);
  return out;
}

int status_exit(const cc::SolveReport& report) {
  switch (report.status) {
    case cc::GlobalStatus::Optimal: return kExitOk;
    case cc::GlobalStatus::Infeasible: return kExitInfeasible;
    case cc::GlobalStatus::Unbounded: return kExitUnbounded;
  }
  return kExitError;
}

int run_solve(const CommonOpts& opts, const std::string& cone_name, double tol,
              bool parallel, bool complete, bool auto_extend,
              const cc::SolverConfig& base_cfg) {
  auto inst = cc::parse_instance(opts.path);
  cc::SolverConfig cfg = base_cfg;
  if (tol > 0) {
    cfg.eps_opt = tol;
    cfg.eps_feas = tol;
    cfg.eps_cone = tol;
  }
  cc::ConeKind cone =
      cone_name == "gamma" ? cc::ConeKind::GAMMA : cc::ConeKind::DNN;
  cc::SolveOptions options{parallel, complete, auto_extend};
  auto report = cc::solve(inst.problem, cone, cfg, options, inst.pattern);

  if (opts.json()) {
    ordered_json out = report_to_json(report, cfg);
    out["cone"] = cone_name;
    if (complete && report.completed_matrix) {
      ordered_json rows = ordered_json::array();
      for (cc::Index i = 0; i < report.completed_matrix->rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (cc::Index j = 0; j < report.completed_matrix->cols(); ++j)
          row.push_back(cc::format_real((*report.completed_matrix)(i, j)));
        rows.push_back(row);
      }
      out["completed_matrix"] = rows;
    }
    if (complete && report.glued_vector) {
      ordered_json row = ordered_json::array();
      for (cc::Index i = 0; i < report.glued_vector->size(); ++i)
        row.push_back(cc::format_real((*report.glued_vector)(i)));
      out["glued_vector"] = row;
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "instance: " << (inst.name.empty() ? opts.path : inst.name)
              << "\ncone: " << cone_name << "\n";
    switch (report.status) {
      case cc::GlobalStatus::Optimal:
        std::cout << "status: optimal\nvalue: " << cc::format_real(report.value)
                  << (report.heuristic ? "  (heuristic upper bound)" : "")
                  << "\n";
        break;
      case cc::GlobalStatus::Infeasible:
        std::cout << "status: infeasible\n";
        break;
      case cc::GlobalStatus::Unbounded:
        std::cout << "status: unbounded\n";
        break;
    }
    for (const auto& b : report.blocks)
      std::cout << "  block " << clique_to_string(b.clique)
                << "  contribution " << cc::format_real(b.objective_contribution)
                << "\n";
    if (complete && report.completed_matrix) {
      std::cout << "completed matrix:\n";
      for (cc::Index i = 0; i < report.completed_matrix->rows(); ++i) {
        std::cout << "  ";
        for (cc::Index j = 0; j < report.completed_matrix->cols(); ++j)
          std::cout << cc::format_real((*report.completed_matrix)(i, j))
                    << (j + 1 < report.completed_matrix->cols() ? " " : "");
        std::cout << "\n";
      }
    }
    if (complete && report.glued_vector) {
      std::cout << "recovered x:";
      for (cc::Index i = 0; i < report.glued_vector->size(); ++i)
        std::cout << " " << cc::format_real((*report.glued_vector)(i));
      std::cout << "\n";
    }
    print_tolerances(cfg);
  }
  return status_exit(report);
}

int run_certify(const CommonOpts& opts, bool strict, bool pre_pass,
                bool auto_extend, const cc::SolverConfig& cfg) {
  auto inst = cc::parse_instance(opts.path);
  auto plan = cc::plan_decomposition(inst.problem, inst.pattern, auto_extend);
  auto cert = cc::certify_plan(plan, !pre_pass, cfg);

  if (opts.json()) {
    ordered_json out;
    out["verdict"] = cc::verdict_name(cert.overall);
    out["used_records"] = cert.used_records;
    ordered_json cliques = ordered_json::array();
    for (const auto& cc_ : cert.cliques) {
      ordered_json jc;
      jc["clique"] = cc_.clique;
      jc["i_small_blocks"] = cc_.small_blocks;
      jc["ii_nonconvex_exact"] = cc_.nonconvex_exact;
      jc["iii_both"] = cc_.both();
      jc["iv_convex_exact"] = cc_.convex_exact;
      jc["v_diagonal"] = cc_.diagonal;
      jc["notes"] = cc_.notes;
      cliques.push_back(jc);
    }
    out["cliques"] = cliques;
    out["tolerances"] = tolerances_json(cfg);
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "instance: " << (inst.name.empty() ? opts.path : inst.name)
              << "\n";
    std::cout << "clique                conditions\n";
    for (const auto& cc_ : cert.cliques) {
      std::string conds;
      if (cc_.small_blocks) conds += " (i)";
      if (cc_.nonconvex_exact) conds += " (ii)";
      if (cc_.both()) conds += " (iii)";
      if (cc_.convex_exact) conds += " (iv)";
      if (cc_.diagonal) conds += " (v) diagonal";
      if (conds.empty()) conds = " none";
      std::cout << "  " << clique_to_string(cc_.clique) << " :" << conds
                << "\n";
      for (const auto& note : cc_.notes)
        std::cout << "      " << note << "\n";
    }
    std::cout << "verdict: " << cc::verdict_name(cert.overall) << "\n";
    print_tolerances(cfg);
  }
  if (strict && cert.overall != cc::CertVerdict::GAMMA_EQ_CPP_EQ_DNN)
    return kExitUncertified;
  return kExitOk;
}

int run_oracle(const CommonOpts& opts, bool auto_extend,
               const cc::SolverConfig& cfg) {
  auto inst = cc::parse_instance(opts.path);
  cc::SolveOptions options;
  options.auto_extend = auto_extend;
  auto report =
      cc::solve(inst.problem, cc::ConeKind::GAMMA, cfg, options, inst.pattern);
  if (opts.json()) {
    ordered_json out = report_to_json(report, cfg);
    out["cone"] = "gamma";
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "instance: " << (inst.name.empty() ? opts.path : inst.name)
              << "\ncone: gamma (brute force)\n";
    switch (report.status) {
      case cc::GlobalStatus::Optimal:
        std::cout << "status: optimal\nvalue: " << cc::format_real(report.value)
                  << (report.heuristic ? "  (heuristic upper bound)" : "")
                  << "\n";
        break;
      case cc::GlobalStatus::Infeasible:
        std::cout << "status: infeasible\n";
        break;
      case cc::GlobalStatus::Unbounded:
        std::cout << "status: unbounded\n";
        break;
    }
    print_tolerances(cfg);
  }
  return status_exit(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clique-tree decomposition solver for block-clique COPs"};
  app.require_subcommand(1);

  CommonOpts analyze_opts, extend_opts, decompose_opts, solve_opts,
      certify_opts, oracle_opts;
  std::string extend_output;
  std::string decompose_dir = "decomposed";
  std::string cone_name = "dnn";
  double tol = 0.0;
  bool parallel = false, complete = false, auto_extend = false, strict = false,
       pre_pass = false;
  unsigned seed = 0;

  auto add_common = [](CLI::App* sub, CommonOpts& opts) {
    sub->add_option("instance", opts.path, "instance file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--format", opts.format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
  };

  auto* analyze = app.add_subcommand(
      "analyze", "aggregated graph, chordality, cliques and clique tree");
  add_common(analyze, analyze_opts);
  analyze->add_flag("--auto-extend", auto_extend,
                    "extend non-block-clique patterns");

  auto* extend = app.add_subcommand(
      "extend", "emit the instance with its smallest block-clique extension");
  add_common(extend, extend_opts);
  extend->add_option("-o,--output", extend_output, "output path");

  auto* decompose_cmd =
      app.add_subcommand("decompose", "emit per-clique subproblem files");
  add_common(decompose_cmd, decompose_opts);
  decompose_cmd->add_option("--out-dir", decompose_dir, "output directory");
  decompose_cmd->add_flag("--auto-extend", auto_extend, "");

  auto* solve_cmd = app.add_subcommand("solve", "run the clique-tree solver");
  add_common(solve_cmd, solve_opts);
  solve_cmd->add_option("--cone", cone_name, "dnn or gamma")
      ->check(CLI::IsMember({"dnn", "gamma"}));
  solve_cmd->add_option("--tol", tol, "override feasibility/optimality tol");
  solve_cmd->add_flag("--parallel", parallel, "solve leaf cliques in parallel");
  solve_cmd->add_flag("--complete", complete,
                      "attach the completed matrix / recovered vector");
  solve_cmd->add_flag("--auto-extend", auto_extend, "");
  solve_cmd->add_option("--seed", seed, "solver seed");

  auto* certify_cmd = app.add_subcommand(
      "certify", "per-clique equivalence conditions and overall verdict");
  add_common(certify_cmd, certify_opts);
  certify_cmd->add_flag("--strict", strict,
                        "exit 4 unless fully gamma = cpp = dnn");
  certify_cmd->add_flag("--pre-pass", pre_pass,
                        "skip the backward pass; conservative checks only");
  certify_cmd->add_flag("--auto-extend", auto_extend, "");
  certify_cmd->add_option("--seed", seed, "solver seed");

  auto* oracle_cmd = app.add_subcommand(
      "oracle", "gamma brute force over the clique decomposition");
  add_common(oracle_cmd, oracle_opts);
  oracle_cmd->add_flag("--auto-extend", auto_extend, "");
  oracle_cmd->add_option("--seed", seed, "oracle seed");

  CLI11_PARSE(app, argc, argv);

  try {
    cc::SolverConfig cfg;
    cfg.seed = resolve_seed(seed);
    if (analyze->parsed()) return run_analyze(analyze_opts, auto_extend);
    if (extend->parsed()) return run_extend(extend_opts, extend_output);
    if (decompose_cmd->parsed())
      return run_decompose(decompose_opts, decompose_dir, auto_extend);
    if (solve_cmd->parsed())
      return run_solve(solve_opts, cone_name, tol, parallel, complete,
                       auto_extend, cfg);
    if (certify_cmd->parsed())
      return run_certify(certify_opts, strict, pre_pass, auto_extend, cfg);
    if (oracle_cmd->parsed())
      return run_oracle(oracle_opts, auto_extend, cfg);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
