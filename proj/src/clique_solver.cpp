#include "cliquecop/clique_solver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace cliquecop {

namespace {

// Relabels a node subset to 1..|nodes| so the graph machinery can treat a
// component as a standalone graph.
SparsityGraph subgraph(const SparsityGraph& g, const std::vector<Index>& nodes) {
  SparsityGraph out(static_cast<Index>(nodes.size()));
  auto local = [&nodes](Index g_id) {
    return static_cast<Index>(
        std::lower_bound(nodes.begin(), nodes.end(), g_id) - nodes.begin() + 1);
  };
  for (Index v : nodes)
    for (Index w : g.neighbors(v))
      if (v < w) out.add_edge(local(v), local(w));
  return out;
}

CliqueTree relabel_tree(const CliqueTree& t, const std::vector<Index>& nodes) {
  CliqueTree out = t;
  for (auto& c : out.cliques)
    for (auto& v : c) v = nodes[static_cast<std::size_t>(v) - 1];
  for (auto& [r, k] : out.anchor) k = nodes[static_cast<std::size_t>(k) - 1];
  return out;
}

// Fresh copy of the subproblem with diagonal coefficients taken from the
// working per-node state; the anchor coefficient is zeroed when requested
// (the G_r objective excludes it) and +inf entries become pins.
Subproblem instantiate(const Subproblem& base,
                       const std::vector<ExtReal>& coeff, bool zero_anchor) {
  Subproblem sub = base;
  sub.inf_diagonal.clear();
  for (Index li = 0; li < sub.size(); ++li) {
    Index g = sub.clique[static_cast<std::size_t>(li)];
    if (zero_anchor && g == sub.anchor) {
      sub.objective(li, li) = 0.0;
      continue;
    }
    const ExtReal& c = coeff[static_cast<std::size_t>(g)];
    if (c.is_infinite()) {
      sub.objective(li, li) = 0.0;
      sub.inf_diagonal.push_back(li);
    } else {
      sub.objective(li, li) = c.finite();
    }
  }
  return sub;
}

SolveStatus dispatch(const Subproblem& sub, ConeKind cone,
                     const SolverConfig& cfg) {
  if (cone == ConeKind::GAMMA) return gamma_oracle(sub, cfg);
  if (sub.all_diagonal()) return solve_block_lp(sub);
  return solve_block(sub, cfg);
}

// Negative-objective recession ray probe at lambda = 0, used when the
// lambda = 1 subproblem is infeasible: the 0 * inf rule only stands when
// the recession value is 0, not -inf.
bool recession_ray_negative(const Subproblem& sub, ConeKind cone,
                            const SolverConfig& cfg) {
  Subproblem probe = sub;
  probe.anchor_value = 0.0;
  Index al = probe.anchor_local();
  if (std::find(probe.inf_diagonal.begin(), probe.inf_diagonal.end(), al) ==
      probe.inf_diagonal.end())
    probe.inf_diagonal.push_back(al);
  probe.objective(al, al) = 0.0;
  if (cone == ConeKind::GAMMA) {
    auto res = gamma_oracle(probe, cfg);
    return res.kind == SolveStatus::Kind::Unbounded;
  }
  auto res = solve_recession(probe, cfg);
  if (res.kind == SolveStatus::Kind::Infeasible) return false;
  return res.value < -cfg.unbounded_tol;
}

}  // namespace

DecompositionPlan plan_decomposition(const ConicProblem& problem,
                                     const std::optional<SparsityGraph>& pattern,
                                     bool auto_extend) {
  DecompositionPlan plan{aggregated_sparsity(problem),
                         SparsityGraph(problem.n()), false, {}};
  if (pattern) {
    if (pattern->n() != problem.n())
      throw std::invalid_argument("plan: pattern node count differs from n");
    for (auto [i, j] : plan.aggregated.edges())
      if (!pattern->has_edge(i, j))
        throw std::invalid_argument(
            "plan: explicit pattern does not cover data entry (" +
            std::to_string(i) + "," + std::to_string(j) + ")");
    plan.effective = *pattern;
    plan.from_pattern = true;
  } else {
    plan.effective = plan.aggregated;
  }

  auto comps = plan.effective.components();
  // The component containing node 1 is planned first.
  std::stable_sort(comps.begin(), comps.end(),
                   [](const auto& a, const auto& b) {
                     bool a1 = std::binary_search(a.begin(), a.end(), Index{1});
                     bool b1 = std::binary_search(b.begin(), b.end(), Index{1});
                     return a1 > b1;
                   });

  std::vector<std::vector<Index>> all_cliques;
  std::vector<ComponentPlan> parts;
  for (const auto& nodes : comps) {
    ComponentPlan part;
    part.nodes = nodes;
    part.contains_root = std::binary_search(nodes.begin(), nodes.end(), Index{1});
    SparsityGraph local = subgraph(plan.effective, nodes);
    if (!is_block_clique(local)) {
      if (!auto_extend)
        throw std::invalid_argument(
            "plan: sparsity pattern is not block-clique (component containing "
            "node " +
            std::to_string(nodes.front()) +
            "); rerun with the extension enabled");
      local = smallest_block_clique_extension(local);
      part.extended = true;
    }
    Index root_local = 1;
    if (part.contains_root)
      root_local = static_cast<Index>(
          std::lower_bound(nodes.begin(), nodes.end(), Index{1}) -
          nodes.begin() + 1);
    part.tree = relabel_tree(build_clique_tree(local, root_local), nodes);
    for (int r = 1; r <= part.tree.size(); ++r)
      all_cliques.push_back(part.tree.clique(r));
    parts.push_back(std::move(part));
  }

  auto assignment = correlative_sparsity_check(problem, all_cliques);
  if (!assignment.ok()) {
    std::string ids;
    for (int id : assignment.unassignable)
      ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    throw std::invalid_argument(
        "plan: constraints not coverable by any single clique: " + ids);
  }

  // Remap the flat clique positions onto per-component assignments.
  std::size_t offset = 0;
  for (auto& part : parts) {
    CorrelativeAssignment local_assign;
    for (const auto& [id, pos] : assignment.clique_of) {
      if (pos > static_cast<int>(offset) &&
          pos <= static_cast<int>(offset) + part.tree.size())
        local_assign.clique_of[id] = pos - static_cast<int>(offset);
    }
    part.dp = decompose(problem, part.tree, local_assign);
    offset += static_cast<std::size_t>(part.tree.size());
    plan.components.push_back(std::move(part));
  }
  return plan;
}

BackwardResult backward_pass(const DecomposedProblem& dp, ConeKind cone,
                             const SolverConfig& cfg, bool parallel) {
  const int ell = dp.size();
  // Working diagonal coefficients per node, seeded from the local data (a
  // node's diagonal coefficient is shared only through anchors).
  Index max_node = 0;
  for (const auto& c : dp.tree.cliques)
    for (Index v : c) max_node = std::max(max_node, v);
  std::vector<ExtReal> coeff(static_cast<std::size_t>(max_node) + 1,
                             ExtReal(0.0));
  for (int r = 1; r <= ell; ++r) {
    const auto& sub = dp.subproblems[static_cast<std::size_t>(r) - 1];
    for (Index li = 0; li < sub.size(); ++li)
      coeff[static_cast<std::size_t>(sub.clique[static_cast<std::size_t>(li)])] =
          ExtReal(sub.objective(li, li));
  }

  BackwardResult out;
  out.records.resize(static_cast<std::size_t>(std::max(0, ell - 1)));

  // Children count for leaf scheduling.
  std::vector<int> pending(static_cast<std::size_t>(ell) + 1, 0);
  for (const auto& [r, p] : dp.tree.parent) pending[static_cast<std::size_t>(p)]++;

  std::vector<int> ready;
  for (int r = 2; r <= ell; ++r)
    if (pending[static_cast<std::size_t>(r)] == 0) ready.push_back(r);

  auto solve_one = [&](int r) {
    const auto& base = dp.subproblems[static_cast<std::size_t>(r) - 1];
    BackwardRecord rec;
    rec.clique_index = r;
    const ExtReal anchor_coeff = coeff[static_cast<std::size_t>(base.anchor)];
    Subproblem sub = instantiate(base, coeff, true);
    sub.anchor_value = 1.0;
    if (anchor_coeff.is_infinite()) {
      // The anchor is already pinned to zero upstream; X_kk = 1 cannot hold,
      // but a negative ray at lambda = 0 must still be surfaced.
      rec.eta_tilde = ExtReal::infinity();
      rec.block_template = Eigen::MatrixXd::Zero(sub.size(), sub.size());
      if (recession_ray_negative(sub, cone, cfg)) rec.unbounded_ray = true;
      return rec;
    }
    SolveStatus st = dispatch(sub, cone, cfg);
    rec.heuristic = st.heuristic;
    switch (st.kind) {
      case SolveStatus::Kind::Optimal:
        rec.eta_tilde = ExtReal(st.value);
        rec.block_template = st.block;
        break;
      case SolveStatus::Kind::Infeasible:
        rec.eta_tilde = ExtReal::infinity();
        rec.block_template = Eigen::MatrixXd::Zero(sub.size(), sub.size());
        if (recession_ray_negative(sub, cone, cfg)) rec.unbounded_ray = true;
        break;
      case SolveStatus::Kind::Unbounded:
        rec.eta_tilde = ExtReal(0.0);  // value handled via the global status
        rec.block_template = Eigen::MatrixXd::Zero(sub.size(), sub.size());
        rec.unbounded_ray = true;
        break;
    }
    return rec;
  };

  auto commit = [&](int r, BackwardRecord rec) {
    Index k = dp.subproblems[static_cast<std::size_t>(r) - 1].anchor;
    coeff[static_cast<std::size_t>(k)] += rec.eta_tilde;
    rec.updated_anchor_coeff = coeff[static_cast<std::size_t>(k)];
    out.unbounded_seen = out.unbounded_seen || rec.unbounded_ray;
    out.heuristic = out.heuristic || rec.heuristic;
    out.records[static_cast<std::size_t>(r) - 2] = std::move(rec);
  };

  if (!parallel) {
    // Reverse running-intersection order: children carry larger indices, so
    // descending order always solves a clique after all of its children.
    for (int r = ell; r >= 2; --r) commit(r, solve_one(r));
  } else {
    // Current leaf set solved concurrently, updates applied in descending
    // index order, then the next leaf layer.
    while (!ready.empty()) {
      std::sort(ready.rbegin(), ready.rend());
      std::vector<std::future<BackwardRecord>> futures;
      futures.reserve(ready.size());
      for (int r : ready)
        futures.push_back(std::async(std::launch::async,
                                     [&solve_one, r] { return solve_one(r); }));
      // Join the whole layer before touching shared coefficients.
      std::vector<BackwardRecord> batch;
      batch.reserve(futures.size());
      for (auto& f : futures) batch.push_back(f.get());
      std::vector<int> next;
      for (std::size_t i = 0; i < ready.size(); ++i) {
        commit(ready[i], std::move(batch[i]));
        int p = dp.tree.parent.at(ready[i]);
        if (p >= 2 && --pending[static_cast<std::size_t>(p)] == 0)
          next.push_back(p);
      }
      ready = std::move(next);
    }
  }

  const auto& root_base = dp.subproblems.front();
  out.root = instantiate(root_base, coeff, false);
  out.root_anchor_infinite =
      coeff[static_cast<std::size_t>(root_base.anchor)].is_infinite();
  return out;
}

SolveReport forward_pass(const DecomposedProblem& dp,
                         const BackwardResult& backward,
                         const SolveStatus& root_status) {
  if (backward.unbounded_seen)
    throw std::logic_error("forward_pass: backward pass saw an unbounded ray");
  if (!root_status.optimal())
    throw std::logic_error("forward_pass: root was not solved to optimality");
  const int ell = dp.size();

  SolveReport report;
  report.status = GlobalStatus::Optimal;
  report.value = root_status.value;
  report.per_clique = backward.records;
  report.heuristic = backward.heuristic;

  // X*_ii for every node covered so far; anchors are read from here.
  Index max_node = 0;
  for (const auto& c : dp.tree.cliques)
    for (Index v : c) max_node = std::max(max_node, v);
  std::vector<double> node_value(static_cast<std::size_t>(max_node) + 1, 0.0);

  auto place = [&](int r, const Eigen::MatrixXd& x) {
    BlockSolution bs;
    bs.clique = dp.tree.clique(r);
    bs.block = x;
    bs.objective_contribution = dp.split.contribution(r, bs);
    for (Index li = 0; li < static_cast<Index>(bs.clique.size()); ++li)
      node_value[static_cast<std::size_t>(bs.clique[static_cast<std::size_t>(li)])] =
          x(li, li);
    report.blocks.push_back(std::move(bs));
  };

  place(1, root_status.block);
  for (int r = 2; r <= ell; ++r) {
    const auto& rec = backward.records[static_cast<std::size_t>(r) - 2];
    Index k = dp.tree.anchor.at(r);
    double lambda = std::max(0.0, node_value[static_cast<std::size_t>(k)]);
    if (rec.eta_tilde.is_infinite()) {
      if (lambda > 1e-7)
        throw std::logic_error(
            "forward_pass: positive anchor with infeasible subproblem at "
            "clique " +
            std::to_string(r));
      lambda = 0.0;  // 0 * inf = 0
    }
    place(r, lambda * rec.block_template);
  }
  return report;
}

namespace {

SolveReport solve_component(const ComponentPlan& part, ConeKind cone,
                            const SolverConfig& cfg, const SolveOptions& options,
                            bool& unbounded_seen, bool& heuristic_seen) {
  auto backward = backward_pass(part.dp, cone, cfg, options.parallel);
  heuristic_seen = heuristic_seen || backward.heuristic;

  SolveReport report;
  report.per_clique = backward.records;

  if (part.contains_root) {
    if (backward.root_anchor_infinite) {
      report.status = GlobalStatus::Infeasible;
      report.value = std::numeric_limits<double>::infinity();
      return report;
    }
    Subproblem root = backward.root;
    root.anchor_value = 1.0;
    SolveStatus st = dispatch(root, cone, cfg);
    heuristic_seen = heuristic_seen || st.heuristic;
    switch (st.kind) {
      case SolveStatus::Kind::Infeasible:
        report.status = GlobalStatus::Infeasible;
        report.value = std::numeric_limits<double>::infinity();
        return report;
      case SolveStatus::Kind::Unbounded:
        unbounded_seen = true;
        report.status = GlobalStatus::Unbounded;
        return report;
      case SolveStatus::Kind::Optimal:
        break;
    }
    if (backward.unbounded_seen) {
      // Root feasible and some subproblem carries a negative ray.
      unbounded_seen = true;
      report.status = GlobalStatus::Unbounded;
      return report;
    }
    return forward_pass(part.dp, backward, st);
  }

  // Homogeneous component: value is 0 or -inf by the scaling argument.  The
  // tree's position-1 anchor is just an ordinary variable here, so the
  // probes must not normalize it.
  Subproblem root = backward.root;
  if (backward.root_anchor_infinite &&
      std::find(root.inf_diagonal.begin(), root.inf_diagonal.end(),
                root.anchor_local()) == root.inf_diagonal.end())
    root.inf_diagonal.push_back(root.anchor_local());
  if (cone == ConeKind::GAMMA) {
    // A negative value with x_i = 1 for any i scales to -inf on the cone.
    for (Index i = 0; i < root.size() && !unbounded_seen; ++i) {
      if (std::find(root.inf_diagonal.begin(), root.inf_diagonal.end(), i) !=
          root.inf_diagonal.end())
        continue;
      Subproblem probe = root;
      probe.anchor = probe.clique[static_cast<std::size_t>(i)];
      probe.anchor_value = 1.0;
      auto res = gamma_oracle(probe, cfg);
      heuristic_seen = heuristic_seen || res.heuristic;
      if (res.kind == SolveStatus::Kind::Unbounded ||
          (res.optimal() && res.value < -cfg.unbounded_tol))
        unbounded_seen = true;
    }
  } else {
    auto res = solve_recession(root, cfg);
    if (res.optimal() && res.value < -cfg.unbounded_tol) unbounded_seen = true;
  }
  if (backward.unbounded_seen) unbounded_seen = true;

  report.status = GlobalStatus::Optimal;
  report.value = 0.0;
  for (int r = 1; r <= part.tree.size(); ++r) {
    BlockSolution bs;
    bs.clique = part.tree.clique(r);
    bs.block = Eigen::MatrixXd::Zero(static_cast<Index>(bs.clique.size()),
                                     static_cast<Index>(bs.clique.size()));
    bs.objective_contribution = 0.0;
    report.blocks.push_back(std::move(bs));
  }
  return report;
}

}  // namespace

SolveReport solve(const ConicProblem& problem, ConeKind cone,
                  const SolverConfig& cfg, const SolveOptions& options,
                  const std::optional<SparsityGraph>& pattern) {
  auto plan = plan_decomposition(problem, pattern, options.auto_extend);

  bool unbounded_seen = false;
  bool heuristic_seen = false;
  SolveReport merged;
  merged.status = GlobalStatus::Optimal;
  merged.value = 0.0;
  bool infeasible = false;

  for (const auto& part : plan.components) {
    SolveReport rep =
        solve_component(part, cone, cfg, options, unbounded_seen, heuristic_seen);
    if (rep.status == GlobalStatus::Infeasible) infeasible = true;
    if (rep.status == GlobalStatus::Optimal) merged.value += rep.value;
    merged.blocks.insert(merged.blocks.end(), rep.blocks.begin(),
                         rep.blocks.end());
    merged.per_clique.insert(merged.per_clique.end(), rep.per_clique.begin(),
                             rep.per_clique.end());
  }
  merged.heuristic = heuristic_seen;

  if (infeasible) {
    merged.status = GlobalStatus::Infeasible;
    merged.value = std::numeric_limits<double>::infinity();
    merged.blocks.clear();
    return merged;
  }
  if (unbounded_seen) {
    merged.status = GlobalStatus::Unbounded;
    merged.value = -std::numeric_limits<double>::infinity();
    merged.blocks.clear();
    return merged;
  }

  if (options.complete) {
    if (cone == ConeKind::GAMMA) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(problem.n());
      std::size_t offset = 0;
      for (const auto& part : plan.components) {
        std::vector<BlockSolution> blocks(
            merged.blocks.begin() + static_cast<std::ptrdiff_t>(offset),
            merged.blocks.begin() +
                static_cast<std::ptrdiff_t>(offset + part.tree.cliques.size()));
        auto glued = glue_gamma_solution(blocks, part.tree, problem.n());
        for (Index v : part.nodes) x(v - 1) = glued.x(v - 1);
        offset += part.tree.cliques.size();
      }
      merged.glued_vector = x;
    } else {
      Eigen::MatrixXd full = Eigen::MatrixXd::Zero(problem.n(), problem.n());
      std::size_t offset = 0;
      for (const auto& part : plan.components) {
        std::vector<BlockSolution> blocks(
            merged.blocks.begin() + static_cast<std::ptrdiff_t>(offset),
            merged.blocks.begin() +
                static_cast<std::ptrdiff_t>(offset + part.tree.cliques.size()));
        Eigen::MatrixXd comp = complete_dnn(blocks, part.tree, problem.n());
        for (Index a : part.nodes)
          for (Index b : part.nodes) full(a - 1, b - 1) = comp(a - 1, b - 1);
        offset += part.tree.cliques.size();
      }
      merged.completed_matrix = full;
    }
  }
  return merged;
}

std::string verdict_name(CertVerdict v) {
  switch (v) {
    case CertVerdict::GAMMA_EQ_CPP_EQ_DNN: return "GAMMA_EQ_CPP_EQ_DNN";
    case CertVerdict::CPP_EQ_DNN: return "CPP_EQ_DNN";
    case CertVerdict::UNCERTIFIED: return "UNCERTIFIED";
  }
  return "?";
}

namespace {

bool psd_within(const Eigen::MatrixXd& m, double eps) {
  if (m.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  return eig.eigenvalues()(0) >= -eps * (1.0 + m.norm());
}

Eigen::MatrixXd drop_indices(const Eigen::MatrixXd& m,
                             const std::vector<Index>& keep) {
  Eigen::MatrixXd out(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b)
      out(static_cast<Index>(a), static_cast<Index>(b)) = m(keep[a], keep[b]);
  return out;
}

// Clique indices in the subtree rooted at r (excluding r).
std::vector<int> descendants(const CliqueTree& tree, int r) {
  std::vector<int> out;
  for (int q = r + 1; q <= tree.size(); ++q) {
    int a = q;
    while (a > 1) {
      a = tree.parent.at(a);
      if (a == r) {
        out.push_back(q);
        break;
      }
      if (a < r) break;
    }
  }
  return out;
}

}  // namespace

Certificate certify(const DecomposedProblem& dp,
                    const std::optional<std::vector<BackwardRecord>>& records,
                    const SolverConfig& cfg) {
  Certificate cert;
  cert.used_records = records.has_value();
  const int ell = dp.size();

  for (int r = 1; r <= ell; ++r) {
    const Subproblem& sub = dp.subproblems[static_cast<std::size_t>(r) - 1];
    CliqueCertificate cc;
    cc.clique_index = r;
    cc.clique = sub.clique;
    const int m = sub.size();
    const Index al = sub.anchor_local();

    // (i) the local aggregated pattern is coverable by a block-clique graph
    // with cliques of at most 4 nodes iff every biconnected block of the
    // pattern has at most 4 nodes (completing blocks is the smallest
    // block-clique extension).  Diagonal updates never change the pattern.
    {
      SparsityGraph pat(m);
      auto scan = [&pat, m](const Eigen::MatrixXd& q) {
        for (Index i = 0; i < m; ++i)
          for (Index j = i + 1; j < m; ++j)
            if (q(i, j) != 0.0) pat.add_edge(i + 1, j + 1);
      };
      scan(sub.objective);
      for (const auto& c : sub.eq) scan(c.matrix);
      for (const auto& c : sub.ineq) scan(c.matrix);
      cc.small_blocks = true;
      for (const auto& block : biconnected_components(pat))
        if (block.size() > 4) cc.small_blocks = false;
      if (!cc.small_blocks)
        cc.notes.push_back("(i) a pattern block exceeds 4 nodes");
    }

    // (ii) equality-only, data in S+ + N, Gamma-feasible at lambda = 1,
    // and Psi(0) = {O} certified through the DNN recession probe.
    {
      cc.nonconvex_exact = sub.ineq.empty();
      if (!cc.nonconvex_exact) cc.notes.push_back("(ii) inequalities present");
      if (cc.nonconvex_exact)
        for (const auto& c : sub.eq)
          if (!membership_psd_plus_nonneg(c.matrix, cfg)) {
            cc.nonconvex_exact = false;
            cc.notes.push_back("(ii) constraint " + std::to_string(c.id) +
                               " outside S+ + N");
            break;
          }
      if (cc.nonconvex_exact) {
        Subproblem probe = sub;
        probe.anchor_value = 1.0;
        if (gamma_feasible(probe, cfg) != GammaFeasibility::Feasible) {
          cc.nonconvex_exact = false;
          cc.notes.push_back("(ii) Gamma feasibility not established");
        }
      }
      if (cc.nonconvex_exact && !recession_set_is_origin(sub, cfg)) {
        cc.nonconvex_exact = false;
        cc.notes.push_back("(ii) nonzero DNN recession point; cannot certify");
      }
    }

    // (iv) objective psd off the anchor (exact updated matrix when records
    // are available), psd equality data, psd-off-anchor inequality data.
    {
      std::vector<Index> keep;  // local indices of C~ that are not pinned
      std::vector<ExtReal> diag(static_cast<std::size_t>(m));
      for (Index i = 0; i < m; ++i) diag[static_cast<std::size_t>(i)] = ExtReal(sub.objective(i, i));
      bool pre_pass_ok = true;
      if (records) {
        for (const auto& rec : *records) {
          if (rec.clique_index <= r) continue;
          const auto& child =
              dp.subproblems[static_cast<std::size_t>(rec.clique_index) - 1];
          Index gl = sub.local(child.anchor);
          if (gl >= 0)
            diag[static_cast<std::size_t>(gl)] += rec.eta_tilde;
        }
      } else {
        // Conservative pre-pass: descendants' objective blocks entrywise
        // nonnegative force eta >= 0, keeping the psd check valid on the
        // original coefficients.
        for (int q : descendants(dp.tree, r)) {
          const auto& child = dp.subproblems[static_cast<std::size_t>(q) - 1];
          if (child.objective.minCoeff() < 0.0) {
            pre_pass_ok = false;
            cc.notes.push_back("(iv) descendant clique " + std::to_string(q) +
                               " objective has negative entries");
            break;
          }
        }
      }
      for (Index i = 0; i < m; ++i) {
        if (i == al) continue;
        if (diag[static_cast<std::size_t>(i)].is_infinite()) continue;  // pinned to zero
        keep.push_back(i);
      }
      Eigen::MatrixXd updated = sub.objective;
      for (Index i = 0; i < m; ++i)
        if (!diag[static_cast<std::size_t>(i)].is_infinite())
          updated(i, i) = diag[static_cast<std::size_t>(i)].finite();
      cc.convex_exact = pre_pass_ok && psd_within(drop_indices(updated, keep),
                                                  cfg.eps_cone);
      if (pre_pass_ok && !cc.convex_exact)
        cc.notes.push_back("(iv) objective not psd off the anchor");
      if (cc.convex_exact)
        for (const auto& c : sub.eq)
          if (!psd_within(c.matrix, cfg.eps_cone)) {
            cc.convex_exact = false;
            cc.notes.push_back("(iv) equality " + std::to_string(c.id) +
                               " not psd");
            break;
          }
      if (cc.convex_exact)
        for (const auto& c : sub.ineq)
          if (!psd_within(drop_indices(c.matrix, keep), cfg.eps_cone)) {
            cc.convex_exact = false;
            cc.notes.push_back("(iv) inequality " + std::to_string(c.id) +
                               " not psd off the anchor");
            break;
          }
    }

    // (v) all local data diagonal; diagonal-only updates preserve it.
    cc.diagonal = sub.all_diagonal();

    cert.cliques.push_back(std::move(cc));
  }

  bool all_gamma = true, all_dnn = true;
  for (const auto& cc : cert.cliques) {
    all_gamma = all_gamma && cc.gamma_cpp();
    all_dnn = all_dnn && cc.cpp_dnn();
  }
  if (all_gamma && all_dnn)
    cert.overall = CertVerdict::GAMMA_EQ_CPP_EQ_DNN;
  else if (all_dnn)
    cert.overall = CertVerdict::CPP_EQ_DNN;
  else
    cert.overall = CertVerdict::UNCERTIFIED;
  return cert;
}

Certificate certify_plan(const DecompositionPlan& plan, bool with_records,
                         const SolverConfig& cfg) {
  Certificate merged;
  merged.overall = CertVerdict::GAMMA_EQ_CPP_EQ_DNN;
  for (const auto& part : plan.components) {
    std::optional<std::vector<BackwardRecord>> records;
    if (with_records) {
      auto backward = backward_pass(part.dp, ConeKind::DNN, cfg, false);
      records = backward.records;
      merged.used_records = true;
    }
    Certificate c = certify(part.dp, records, cfg);
    for (auto& cc : c.cliques) merged.cliques.push_back(std::move(cc));
    merged.overall = std::max(merged.overall, c.overall);  // weakest wins
  }
  return merged;
}

}  // namespace cliquecop
