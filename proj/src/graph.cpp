#include "cliquecop/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>

namespace cliquecop {

SparsityGraph::SparsityGraph(Index n) : n_(n), adj_(static_cast<size_t>(n)) {
  if (n < 1) throw std::invalid_argument("SparsityGraph: n < 1");
}

SparsityGraph::SparsityGraph(Index n,
                             const std::vector<std::pair<Index, Index>>& edges)
    : SparsityGraph(n) {
  for (auto [i, j] : edges) add_edge(i, j);
}

bool SparsityGraph::has_edge(Index i, Index j) const {
  if (i < 1 || i > n_ || j < 1 || j > n_ || i == j) return false;
  return adj_[i - 1].count(j) > 0;
}

void SparsityGraph::add_edge(Index i, Index j) {
  if (i < 1 || i > n_ || j < 1 || j > n_)
    throw std::out_of_range("SparsityGraph: node outside [1,n]");
  if (i == j) throw std::invalid_argument("SparsityGraph: self-loop");
  if (adj_[i - 1].insert(j).second) {
    adj_[j - 1].insert(i);
    ++edge_count_;
  }
}

const std::set<Index>& SparsityGraph::neighbors(Index i) const {
  return adj_.at(i - 1);
}

std::vector<std::pair<Index, Index>> SparsityGraph::edges() const {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 1; i <= n_; ++i)
    for (Index j : adj_[i - 1])
      if (i < j) out.emplace_back(i, j);
  return out;
}

bool SparsityGraph::is_connected() const {
  return components().size() == 1;
}

std::vector<std::vector<Index>> SparsityGraph::components() const {
  std::vector<bool> seen(static_cast<size_t>(n_) + 1, false);
  std::vector<std::vector<Index>> comps;
  for (Index s = 1; s <= n_; ++s) {
    if (seen[s]) continue;
    std::vector<Index> comp;
    std::deque<Index> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      Index v = queue.front();
      queue.pop_front();
      comp.push_back(v);
      for (Index w : adj_[v - 1])
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

bool CliqueTree::satisfies_rip() const {
  const int ell = size();
  if (ell == 0) return false;
  std::set<Index> prefix(cliques[0].begin(), cliques[0].end());
  for (int r = 2; r <= ell; ++r) {
    std::vector<Index> inter;
    for (Index v : cliques[r - 1])
      if (prefix.count(v)) inter.push_back(v);
    auto pit = parent.find(r);
    auto ait = anchor.find(r);
    if (pit == parent.end() || ait == anchor.end()) return false;
    if (inter.size() != 1 || inter[0] != ait->second) return false;
    const auto& par = cliques[pit->second - 1];
    if (!std::binary_search(par.begin(), par.end(), ait->second)) return false;
    std::vector<Index> pinter;
    for (Index v : cliques[r - 1])
      if (std::binary_search(par.begin(), par.end(), v)) pinter.push_back(v);
    if (pinter != inter) return false;
    prefix.insert(cliques[r - 1].begin(), cliques[r - 1].end());
  }
  return true;
}

SparsityGraph aggregated_sparsity(const ConicProblem& problem) {
  SparsityGraph g(problem.n());
  auto scan = [&g](const SparseSymMatrix& m) {
    for (const auto& t : m.entries())
      if (t.i != t.j && t.v != 0.0) g.add_edge(t.i, t.j);
  };
  scan(problem.objective());
  for (const auto& c : problem.eq_constraints()) scan(c.matrix);
  for (const auto& c : problem.ineq_constraints()) scan(c.matrix);
  return g;
}

CorrelativeAssignment correlative_sparsity_check(
    const ConicProblem& problem,
    const std::vector<std::vector<Index>>& cliques) {
  CorrelativeAssignment out;
  auto try_assign = [&](const Constraint& c) {
    for (std::size_t q = 0; q < cliques.size(); ++q) {
      if (c.matrix.supported_on(cliques[q])) {
        out.clique_of[c.id] = static_cast<int>(q) + 1;
        return;
      }
    }
    out.unassignable.push_back(c.id);
  };
  for (const auto& c : problem.eq_constraints()) try_assign(c);
  for (const auto& c : problem.ineq_constraints()) try_assign(c);
  std::sort(out.unassignable.begin(), out.unassignable.end());
  return out;
}

ChordalityResult is_chordal(const SparsityGraph& g) {
  const Index n = g.n();
  // Maximum cardinality search: repeatedly pick the unvisited node with the
  // most visited neighbors (lowest index breaks ties).
  std::vector<int> weight(static_cast<size_t>(n) + 1, 0);
  std::vector<bool> visited(static_cast<size_t>(n) + 1, false);
  std::vector<Index> order;  // MCS visit order
  order.reserve(static_cast<size_t>(n));
  for (Index step = 0; step < n; ++step) {
    Index best = 0;
    for (Index v = 1; v <= n; ++v)
      if (!visited[v] && (best == 0 || weight[v] > weight[best])) best = v;
    visited[best] = true;
    order.push_back(best);
    for (Index w : g.neighbors(best))
      if (!visited[w]) ++weight[w];
  }
  // The reverse of the MCS order is a perfect elimination ordering iff the
  // graph is chordal; verify directly.
  std::vector<Index> rank(static_cast<size_t>(n) + 1, 0);
  for (Index pos = 0; pos < n; ++pos) rank[order[pos]] = pos;
  std::vector<Index> elim(order.rbegin(), order.rend());
  for (Index v : elim) {
    // Neighbors of v that come later in elimination order (earlier in MCS).
    std::vector<Index> later;
    for (Index w : g.neighbors(v))
      if (rank[w] < rank[v]) later.push_back(w);
    if (later.empty()) continue;
    // The later neighbor closest to v must be adjacent to all the others.
    Index pivot = *std::max_element(
        later.begin(), later.end(),
        [&rank](Index a, Index b) { return rank[a] < rank[b]; });
    for (Index w : later)
      if (w != pivot && !g.has_edge(pivot, w))
        return {false, std::nullopt};
  }
  return {true, elim};
}

namespace {

void bron_kerbosch(const SparsityGraph& g, std::set<Index>& r,
                   std::set<Index> p, std::set<Index> x,
                   std::vector<std::vector<Index>>& out) {
  if (p.empty() && x.empty()) {
    out.emplace_back(r.begin(), r.end());
    return;
  }
  // Pivot on the vertex with most neighbors in p.
  Index pivot = 0;
  std::size_t best = 0;
  for (const auto& side : {p, x})
    for (Index u : side) {
      std::size_t cnt = 0;
      for (Index w : g.neighbors(u))
        if (p.count(w)) ++cnt;
      if (pivot == 0 || cnt > best) {
        pivot = u;
        best = cnt;
      }
    }
  std::vector<Index> candidates;
  for (Index v : p)
    if (pivot == 0 || !g.neighbors(pivot).count(v)) candidates.push_back(v);
  for (Index v : candidates) {
    std::set<Index> p2, x2;
    for (Index w : g.neighbors(v)) {
      if (p.count(w)) p2.insert(w);
      if (x.count(w)) x2.insert(w);
    }
    r.insert(v);
    bron_kerbosch(g, r, std::move(p2), std::move(x2), out);
    r.erase(v);
    p.erase(v);
    x.insert(v);
  }
}

}  // namespace

std::vector<std::vector<Index>> maximal_cliques(const SparsityGraph& g) {
  auto chordal = is_chordal(g);
  std::vector<std::vector<Index>> cliques;
  if (chordal.chordal) {
    // Read candidate cliques off the elimination order, then drop the
    // non-maximal ones.
    const auto& elim = *chordal.elimination_order;
    std::vector<Index> rank(static_cast<size_t>(g.n()) + 1, 0);
    for (Index pos = 0; pos < g.n(); ++pos) rank[elim[pos]] = pos;
    for (Index v : elim) {
      std::vector<Index> c{v};
      for (Index w : g.neighbors(v))
        if (rank[w] > rank[v]) c.push_back(w);
      std::sort(c.begin(), c.end());
      cliques.push_back(std::move(c));
    }
    std::vector<std::vector<Index>> keep;
    for (std::size_t a = 0; a < cliques.size(); ++a) {
      bool maximal = true;
      for (std::size_t b = 0; b < cliques.size() && maximal; ++b) {
        if (a == b || cliques[a].size() > cliques[b].size()) continue;
        if (cliques[a] == cliques[b] && a > b) {
          maximal = false;
          break;
        }
        if (cliques[a] != cliques[b] &&
            std::includes(cliques[b].begin(), cliques[b].end(),
                          cliques[a].begin(), cliques[a].end()))
          maximal = false;
      }
      if (maximal) keep.push_back(cliques[a]);
    }
    cliques = std::move(keep);
  } else {
    if (g.n() > 50)
      throw std::invalid_argument(
          "maximal_cliques: non-chordal enumeration limited to n <= 50");
    std::set<Index> r, p, x;
    for (Index v = 1; v <= g.n(); ++v) p.insert(v);
    bron_kerbosch(g, r, std::move(p), std::move(x), cliques);
  }
  std::sort(cliques.begin(), cliques.end());
  cliques.erase(std::unique(cliques.begin(), cliques.end()), cliques.end());
  return cliques;
}

bool is_block_clique(const SparsityGraph& g) {
  if (!is_chordal(g).chordal) return false;
  auto cliques = maximal_cliques(g);
  for (std::size_t a = 0; a < cliques.size(); ++a)
    for (std::size_t b = a + 1; b < cliques.size(); ++b) {
      std::vector<Index> inter;
      std::set_intersection(cliques[a].begin(), cliques[a].end(),
                            cliques[b].begin(), cliques[b].end(),
                            std::back_inserter(inter));
      if (inter.size() > 1) return false;
    }
  return true;
}

namespace {

// Hopcroft-Tarjan articulation points and biconnected components.
struct BiconnState {
  const SparsityGraph* g;
  std::vector<int> disc, low;
  std::vector<std::pair<Index, Index>> stack;
  std::set<Index> cuts;
  std::vector<std::vector<Index>> blocks;
  int timer = 0;

  void pop_block(std::pair<Index, Index> until) {
    std::set<Index> nodes;
    while (!stack.empty()) {
      auto e = stack.back();
      stack.pop_back();
      nodes.insert(e.first);
      nodes.insert(e.second);
      if (e == until) break;
    }
    blocks.emplace_back(nodes.begin(), nodes.end());
  }

  void dfs(Index u, Index parent) {
    disc[u] = low[u] = ++timer;
    int children = 0;
    for (Index v : g->neighbors(u)) {
      if (v == parent) continue;
      if (disc[v] == 0) {
        ++children;
        stack.emplace_back(u, v);
        dfs(v, u);
        low[u] = std::min(low[u], low[v]);
        if ((parent != 0 && low[v] >= disc[u]) ||
            (parent == 0 && children > 1))
          cuts.insert(u);
        if (low[v] >= disc[u]) pop_block({u, v});
      } else if (disc[v] < disc[u]) {
        stack.emplace_back(u, v);
        low[u] = std::min(low[u], disc[v]);
      }
    }
  }
};

BiconnState run_biconnected(const SparsityGraph& g) {
  BiconnState st;
  st.g = &g;
  st.disc.assign(static_cast<size_t>(g.n()) + 1, 0);
  st.low.assign(static_cast<size_t>(g.n()) + 1, 0);
  for (Index v = 1; v <= g.n(); ++v) {
    if (st.disc[v] != 0) continue;
    st.dfs(v, 0);
    if (!st.stack.empty()) st.pop_block(st.stack.front());
    if (g.neighbors(v).empty()) st.blocks.push_back({v});
  }
  return st;
}

}  // namespace

std::vector<Index> cut_nodes(const SparsityGraph& g) {
  auto st = run_biconnected(g);
  return {st.cuts.begin(), st.cuts.end()};
}

std::vector<std::vector<Index>> biconnected_components(const SparsityGraph& g) {
  auto st = run_biconnected(g);
  std::sort(st.blocks.begin(), st.blocks.end());
  return st.blocks;
}

SparsityGraph smallest_block_clique_extension(const SparsityGraph& g) {
  if (!g.is_connected())
    throw std::invalid_argument(
        "smallest_block_clique_extension: graph must be connected");
  // Completing each 2-connected block keeps exactly the cut nodes of g; a
  // graph without cut nodes becomes the complete graph.
  SparsityGraph out(g.n());
  for (const auto& block : biconnected_components(g))
    for (std::size_t a = 0; a < block.size(); ++a)
      for (std::size_t b = a + 1; b < block.size(); ++b)
        out.add_edge(block[a], block[b]);
  return out;
}

CliqueTree build_clique_tree(const SparsityGraph& g, Index root_contains) {
  if (!g.is_connected())
    throw std::invalid_argument("build_clique_tree: graph must be connected");
  if (!is_block_clique(g))
    throw std::invalid_argument("build_clique_tree: graph is not block-clique");
  auto cliques = maximal_cliques(g);
  const int ell = static_cast<int>(cliques.size());
  int root = -1;
  for (int q = 0; q < ell; ++q)
    if (std::binary_search(cliques[q].begin(), cliques[q].end(),
                           root_contains)) {
      root = q;
      break;
    }
  if (root < 0)
    throw std::invalid_argument("build_clique_tree: root node " +
                                std::to_string(root_contains) +
                                " not in any clique");
  // Breadth-first over the clique-intersection graph, lowest clique index
  // first, so the numbering is a reproducible topological order.
  std::vector<int> order{root};
  std::vector<int> parent_of(static_cast<size_t>(ell), -1);
  std::vector<bool> seen(static_cast<size_t>(ell), false);
  seen[root] = true;
  for (std::size_t head = 0; head < order.size(); ++head) {
    int q = order[head];
    for (int r = 0; r < ell; ++r) {
      if (seen[r]) continue;
      std::vector<Index> inter;
      std::set_intersection(cliques[q].begin(), cliques[q].end(),
                            cliques[r].begin(), cliques[r].end(),
                            std::back_inserter(inter));
      if (inter.empty()) continue;
      seen[r] = true;
      parent_of[r] = q;
      order.push_back(r);
    }
  }

  CliqueTree tree;
  std::vector<int> new_pos(static_cast<size_t>(ell), 0);
  for (int pos = 0; pos < ell; ++pos) new_pos[order[pos]] = pos + 1;
  tree.cliques.resize(static_cast<size_t>(ell));
  for (int pos = 0; pos < ell; ++pos)
    tree.cliques[pos] = cliques[order[pos]];
  tree.anchor[1] = root_contains;
  for (int pos = 2; pos <= ell; ++pos) {
    int old = order[pos - 1];
    int par = new_pos[parent_of[old]];
    tree.parent[pos] = par;
    std::vector<Index> inter;
    std::set_intersection(tree.cliques[pos - 1].begin(),
                          tree.cliques[pos - 1].end(),
                          tree.cliques[par - 1].begin(),
                          tree.cliques[par - 1].end(),
                          std::back_inserter(inter));
    if (inter.size() != 1)
      throw std::logic_error("build_clique_tree: separator is not a node");
    tree.anchor[pos] = inter[0];
  }
  return tree;
}

}  // namespace cliquecop
