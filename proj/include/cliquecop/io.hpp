#ifndef CLIQUECOP_IO_HPP
#define CLIQUECOP_IO_HPP

#include <optional>
#include <string>

#include "cliquecop/graph.hpp"
#include "cliquecop/problem.hpp"

namespace cliquecop {

// On-disk instance: the COP data plus optional metadata and an optional
// explicit sparsity pattern (as written by the extend command) that must
// cover the aggregated pattern of the data.
struct InstanceFile {
  int schema = 1;
  std::string name;
  std::string source;
  ConicProblem problem;
  std::optional<SparsityGraph> pattern;
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

InstanceFile parse_instance_text(const std::string& text,
                                 const std::string& origin = "<string>");
InstanceFile parse_instance(const std::string& path);

std::string instance_to_json(const InstanceFile& inst);
void write_instance(const InstanceFile& inst, const std::string& path);

// 12 significant digits, the format used in all reports.
std::string format_real(double v);

}  // namespace cliquecop

#endif
