#include "cliquecop/problem.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace cliquecop {

bool cone_subset(ConeKind lhs, ConeKind rhs) {
  auto rank = [](ConeKind k) {
    switch (k) {
      case ConeKind::GAMMA: return 0;
      case ConeKind::CPP: return 1;
      case ConeKind::DNN: return 2;
    }
    return 2;
  };
  return rank(lhs) <= rank(rhs);
}

std::string cone_name(ConeKind k) {
  switch (k) {
    case ConeKind::GAMMA: return "gamma";
    case ConeKind::CPP: return "cpp";
    case ConeKind::DNN: return "dnn";
  }
  return "?";
}

ConicProblem::ConicProblem(Index n, SparseSymMatrix objective,
                           std::vector<Constraint> eq_constraints,
                           std::vector<Constraint> ineq_constraints,
                           ConeKind cone)
    : n_(n),
      objective_(std::move(objective)),
      eq_(std::move(eq_constraints)),
      ineq_(std::move(ineq_constraints)),
      cone_(cone) {
  if (n_ < 1) throw std::invalid_argument("ConicProblem: n < 1");
  if (objective_.dim() != n_)
    throw std::invalid_argument("ConicProblem: objective dim != n");
  std::set<int> ids;
  for (const auto* group : {&eq_, &ineq_}) {
    for (const auto& c : *group) {
      if (c.matrix.dim() != n_)
        throw std::invalid_argument("ConicProblem: constraint " +
                                    std::to_string(c.id) + " dim != n");
      if (!ids.insert(c.id).second)
        throw std::invalid_argument("ConicProblem: duplicate constraint id " +
                                    std::to_string(c.id));
    }
  }
}

const Constraint* ConicProblem::find_constraint(int id) const {
  for (const auto& c : eq_)
    if (c.id == id) return &c;
  for (const auto& c : ineq_)
    if (c.id == id) return &c;
  return nullptr;
}

bool ConicProblem::is_equality_id(int id) const {
  return std::any_of(eq_.begin(), eq_.end(),
                     [id](const Constraint& c) { return c.id == id; });
}

Evaluation evaluate(const ConicProblem& problem, const SparseSymMatrix& x) {
  if (x.dim() != problem.n())
    throw std::invalid_argument("evaluate: dimension mismatch");
  Evaluation ev;
  ev.objective = problem.objective().inner(x);
  for (const auto& c : problem.eq_constraints())
    ev.eq_residuals[c.id] = c.matrix.inner(x);
  for (const auto& c : problem.ineq_constraints())
    ev.ineq_values[c.id] = c.matrix.inner(x);
  return ev;
}

ConicProblem import_standard_form(
    const SparseSymMatrix& objective,
    const std::vector<std::pair<SparseSymMatrix, double>>& constraints,
    ConeKind cone) {
  const Index n = objective.dim();
  auto shift = [n](const SparseSymMatrix& m, double d) {
    SparseSymMatrix out(1 + n);
    if (d != 0.0) out.insert(1, 1, -d);
    for (const auto& t : m.entries()) out.insert(t.i + 1, t.j + 1, t.v);
    return out;
  };
  SparseSymMatrix q0 = shift(objective, 0.0);
  std::vector<Constraint> eq;
  int id = 1;
  for (const auto& [m, d] : constraints) {
    if (m.dim() != n)
      throw std::invalid_argument(
          "import_standard_form: constraint dim mismatch");
    eq.push_back({id++, shift(m, d)});
  }
  return ConicProblem(1 + n, std::move(q0), std::move(eq), {}, cone);
}

}  // namespace cliquecop
