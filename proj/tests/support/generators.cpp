#include "support/generators.hpp"

#include <algorithm>
#include <set>

namespace cctest {

using cliquecop::Constraint;
using cliquecop::SparseSymMatrix;
using cliquecop::Triplet;

SparsityGraph random_block_clique_graph(std::mt19937& rng, Index n_max,
                                        Index max_clique) {
  std::uniform_int_distribution<Index> size_dist(2, max_clique);
  std::vector<std::vector<Index>> cliques;
  Index used = std::min<Index>(n_max, size_dist(rng));
  std::vector<Index> first;
  for (Index v = 1; v <= used; ++v) first.push_back(v);
  cliques.push_back(first);
  while (used < n_max) {
    Index fresh = std::min<Index>(n_max - used, size_dist(rng) - 1);
    if (fresh == 0) break;
    std::uniform_int_distribution<Index> node_dist(1, used);
    Index glue = node_dist(rng);
    std::vector<Index> clique{glue};
    for (Index t = 0; t < fresh; ++t) clique.push_back(++used);
    std::sort(clique.begin(), clique.end());
    cliques.push_back(clique);
  }
  SparsityGraph g(used);
  for (const auto& c : cliques)
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b) g.add_edge(c[a], c[b]);
  return g;
}

SparsityGraph random_non_block_clique_chordal(std::mt19937& rng, Index n_max) {
  // Two cliques sharing exactly two vertices; chordal, not block-clique.
  Index n = std::max<Index>(n_max, 5);
  std::uniform_int_distribution<Index> size_dist(3, std::min<Index>(4, n - 2));
  Index a = size_dist(rng);
  Index b = std::min<Index>(n - a + 2, size_dist(rng));
  SparsityGraph g(a + b - 2);
  std::vector<Index> first, second{1, 2};
  for (Index v = 1; v <= a; ++v) first.push_back(v);
  for (Index v = a + 1; v <= a + b - 2; ++v) second.push_back(v);
  for (std::size_t i = 0; i < first.size(); ++i)
    for (std::size_t j = i + 1; j < first.size(); ++j)
      g.add_edge(first[i], first[j]);
  for (std::size_t i = 0; i < second.size(); ++i)
    for (std::size_t j = i + 1; j < second.size(); ++j)
      g.add_edge(second[i], second[j]);
  return g;
}

RandomInstance random_instance(std::mt19937& rng, const InstanceOptions& opt) {
  SparsityGraph g = random_block_clique_graph(rng, opt.n_max, opt.max_clique);
  auto tree = cliquecop::build_clique_tree(g, 1);
  const Index n = g.n();
  std::uniform_real_distribution<double> coef(0.5, 2.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);

  std::vector<Constraint> eq;
  int next_id = 1;
  for (int r = 1; r <= tree.size(); ++r) {
    const auto& clique = tree.clique(r);
    const Index anchor = tree.anchor.at(r);
    if (clique.size() < 2) continue;
    // -a x_anchor + sum_i b_i x_i = 0 with positive a, b.
    Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Index>(clique.size()));
    for (std::size_t i = 0; i < clique.size(); ++i)
      row(static_cast<Index>(i)) = clique[i] == anchor ? -coef(rng) : coef(rng);
    SparseSymMatrix m(n);
    for (std::size_t i = 0; i < clique.size(); ++i)
      for (std::size_t j = i; j < clique.size(); ++j) {
        double v = row(static_cast<Index>(i)) * row(static_cast<Index>(j));
        m.insert(clique[i], clique[j], v);
      }
    eq.push_back({next_id++, std::move(m)});

    if (opt.with_complementarity && clique.size() >= 3) {
      // complementarity pair off the anchor
      std::vector<Index> off;
      for (Index v : clique)
        if (v != anchor && v != 1) off.push_back(v);
      if (off.size() >= 2) {
        std::uniform_int_distribution<std::size_t> pick(0, off.size() - 1);
        std::size_t i = pick(rng), j = pick(rng);
        if (i != j) {
          SparseSymMatrix cm(n);
          cm.insert(std::min(off[i], off[j]), std::max(off[i], off[j]), 1.0);
          eq.push_back({next_id++, std::move(cm)});
        }
      }
    }
  }

  // Random symmetric objective on the clique-covered positions.
  SparseSymMatrix q0(n);
  std::set<std::pair<Index, Index>> seen;
  for (int r = 1; r <= tree.size(); ++r) {
    const auto& clique = tree.clique(r);
    for (std::size_t i = 0; i < clique.size(); ++i)
      for (std::size_t j = i; j < clique.size(); ++j) {
        auto key = std::make_pair(clique[i], clique[j]);
        if (!seen.insert(key).second) continue;
        double v = sym(rng);
        if (key.first == key.second) v = std::abs(v) + 0.1;  // keep diag up
        if (v != 0.0) q0.insert(key.first, key.second, v);
      }
  }
  return {ConicProblem(n, std::move(q0), std::move(eq), {}), std::move(g)};
}

std::vector<cliquecop::BlockSolution> random_consistent_dnn_blocks(
    std::mt19937& rng, const cliquecop::CliqueTree& tree, Index n) {
  // Completely positive global matrix: sum of nonnegative rank-1 terms.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < n + 2; ++t) {
    Eigen::VectorXd a(n);
    for (Index i = 0; i < n; ++i) a(i) = unif(rng) < 0.4 ? 0.0 : unif(rng);
    full += a * a.transpose();
  }
  std::vector<cliquecop::BlockSolution> blocks;
  for (int r = 1; r <= tree.size(); ++r) {
    cliquecop::BlockSolution bs;
    bs.clique = tree.clique(r);
    const Index m = static_cast<Index>(bs.clique.size());
    bs.block.resize(m, m);
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b)
        bs.block(a, b) = full(bs.clique[static_cast<std::size_t>(a)] - 1,
                              bs.clique[static_cast<std::size_t>(b)] - 1);
    blocks.push_back(std::move(bs));
  }
  return blocks;
}

}  // namespace cctest
