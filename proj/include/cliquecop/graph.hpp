#ifndef CLIQUECOP_GRAPH_HPP
#define CLIQUECOP_GRAPH_HPP

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "cliquecop/problem.hpp"

namespace cliquecop {

// Undirected graph on nodes 1..n, no self-loops.
class SparsityGraph {
 public:
  explicit SparsityGraph(Index n);
  SparsityGraph(Index n, const std::vector<std::pair<Index, Index>>& edges);

  Index n() const { return n_; }
  bool has_edge(Index i, Index j) const;
  void add_edge(Index i, Index j);
  const std::set<Index>& neighbors(Index i) const;
  // Edges as (i,j) with i < j, sorted.
  std::vector<std::pair<Index, Index>> edges() const;
  std::size_t edge_count() const { return edge_count_; }

  bool is_connected() const;
  // Connected components as sorted node lists, ordered by smallest node.
  std::vector<std::vector<Index>> components() const;

 private:
  Index n_;
  std::vector<std::set<Index>> adj_;  // adj_[i-1]
  std::size_t edge_count_ = 0;
};

// Maximal cliques ordered so the running intersection property of a
// block-clique graph holds: each C_r (r >= 2) meets the union of its
// predecessors in exactly the anchor {k_r}, shared with parent(r).
struct CliqueTree {
  std::vector<std::vector<Index>> cliques;  // 1-based positions 1..ell
  std::map<int, int> parent;                // r -> q, r >= 2
  std::map<int, Index> anchor;              // r -> k_r; anchor[1] = root node

  int size() const { return static_cast<int>(cliques.size()); }
  const std::vector<Index>& clique(int r) const { return cliques[r - 1]; }
  // Verifies RIP directly against the definition.
  bool satisfies_rip() const;
};

// Smallest graph whose extended edge set covers every nonzero position of
// the objective and all constraint matrices.
SparsityGraph aggregated_sparsity(const ConicProblem& problem);

struct CorrelativeAssignment {
  // constraint id -> clique position (1-based) when successful.
  std::map<int, int> clique_of;
  // ids whose support fits in no single clique; empty on success.
  std::vector<int> unassignable;
  bool ok() const { return unassignable.empty(); }
};

// Assigns every constraint a clique covering its support, preferring the
// lowest clique position.
CorrelativeAssignment correlative_sparsity_check(
    const ConicProblem& problem,
    const std::vector<std::vector<Index>>& cliques);

// Maximum-cardinality search plus a verification pass; the order is a
// perfect elimination ordering iff the graph is chordal.
struct ChordalityResult {
  bool chordal;
  std::optional<std::vector<Index>> elimination_order;
};
ChordalityResult is_chordal(const SparsityGraph& g);

// Exact maximal cliques, sorted internally and deduplicated.  Chordal
// graphs use the elimination order; general graphs fall back to
// Bron-Kerbosch (desk scale).
std::vector<std::vector<Index>> maximal_cliques(const SparsityGraph& g);

// Chordal and all pairwise maximal-clique intersections of size <= 1.
bool is_block_clique(const SparsityGraph& g);

// Cut vertices (articulation points), sorted.
std::vector<Index> cut_nodes(const SparsityGraph& g);

// Biconnected components as sorted node lists (bridges count as 2-node
// blocks; isolated nodes as singletons).
std::vector<std::vector<Index>> biconnected_components(const SparsityGraph& g);

// Completes every 2-connected block into a clique, which preserves the cut
// nodes and yields the smallest block-clique graph containing g.  Input
// must be connected.
SparsityGraph smallest_block_clique_extension(const SparsityGraph& g);

// Builds the clique tree of a connected block-clique graph, rooted at the
// clique containing root_contains, renumbered breadth-first.
CliqueTree build_clique_tree(const SparsityGraph& g, Index root_contains = 1);

}  // namespace cliquecop

#endif
