#ifndef CLIQUECOP_PROBLEM_HPP
#define CLIQUECOP_PROBLEM_HPP

#include <Eigen/Core>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cliquecop/sparse_sym.hpp"

namespace cliquecop {

// Matrix cones over which COP(K) is posed; GAMMA is the nonconvex rank-1
// nonnegative cone, CPP its convex hull, DNN = PSD intersect nonneg.
enum class ConeKind { GAMMA, CPP, DNN };

// True when lhs is contained in rhs (GAMMA <= CPP <= DNN).
bool cone_subset(ConeKind lhs, ConeKind rhs);
std::string cone_name(ConeKind k);

struct Constraint {
  int id;
  SparseSymMatrix matrix;
};

// COP(K): minimize <Q0, X> over X in K with X_11 = 1, <Qp, X> = 0 for
// equality ids and <Qp, X> <= 0 for inequality ids.  All constraints are
// homogeneous; index 1 is the homogenization variable and X_11 = 1 is
// implicit, never stored as data.
class ConicProblem {
 public:
  ConicProblem(Index n, SparseSymMatrix objective,
               std::vector<Constraint> eq_constraints,
               std::vector<Constraint> ineq_constraints,
               ConeKind cone = ConeKind::DNN);

  Index n() const { return n_; }
  const SparseSymMatrix& objective() const { return objective_; }
  const std::vector<Constraint>& eq_constraints() const { return eq_; }
  const std::vector<Constraint>& ineq_constraints() const { return ineq_; }
  ConeKind cone() const { return cone_; }

  const Constraint* find_constraint(int id) const;
  bool is_equality_id(int id) const;

 private:
  Index n_;
  SparseSymMatrix objective_;
  std::vector<Constraint> eq_;
  std::vector<Constraint> ineq_;
  ConeKind cone_;
};

// One clique's piece of a solution: the principal submatrix X_C stored
// densely in clique-local order together with its objective share.
struct BlockSolution {
  std::vector<Index> clique;  // sorted global indices
  Eigen::MatrixXd block;      // |C| x |C| symmetric, clique-local order
  double objective_contribution = 0.0;

  Index size() const { return static_cast<Index>(clique.size()); }
};

struct Evaluation {
  double objective;
  std::map<int, double> eq_residuals;
  std::map<int, double> ineq_values;
};

// <Q0, X> together with all constraint values at X (dim must match).
Evaluation evaluate(const ConicProblem& problem, const SparseSymMatrix& x);

// Homogenizes a standard equality-form COP
//   min <Qbar0, Y> s.t. <Qbar_p, Y> = d_p, Y in K
// into a (1+n)-dimensional COP(K) with matrices [[-d_p, 0], [0, Qbar_p]].
// Index 1 of the result is the new homogenization variable.
ConicProblem import_standard_form(
    const SparseSymMatrix& objective,
    const std::vector<std::pair<SparseSymMatrix, double>>& constraints,
    ConeKind cone = ConeKind::DNN);

}  // namespace cliquecop

#endif
