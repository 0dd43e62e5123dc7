#include <random>

#include "doctest.h"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include "cliquecop/graph.hpp"

using namespace cliquecop;

namespace {

// Figure 1(a): cliques {1,2,3,4}, {3,5,6,7}, {3,8,9}, {5,10,11}.
SparsityGraph figure_1a() {
  SparsityGraph g(11);
  auto complete = [&g](std::vector<Index> c) {
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) g.add_edge(c[i], c[j]);
  };
  complete({1, 2, 3, 4});
  complete({3, 5, 6, 7});
  complete({3, 8, 9});
  complete({5, 10, 11});
  return g;
}

// Figure 1(b): cliques {1,2,3}, {3,4,5,6,7}, {3,8,9,10,11}, {11,12,13}.
SparsityGraph figure_1b() {
  SparsityGraph g(13);
  auto complete = [&g](std::vector<Index> c) {
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) g.add_edge(c[i], c[j]);
  };
  complete({1, 2, 3});
  complete({3, 4, 5, 6, 7});
  complete({3, 8, 9, 10, 11});
  complete({11, 12, 13});
  return g;
}

}  // namespace

TEST_SUITE("sparsity-graph") {

TEST_CASE("aggregated sparsity: diagonal objective is edgeless") {
  SparseSymMatrix q(3);
  q.insert(1, 1, 1.0);
  q.insert(2, 2, 2.0);
  q.insert(3, 3, 3.0);
  ConicProblem p(3, q, {}, {});
  auto g = aggregated_sparsity(p);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("aggregated sparsity of the two-matrix example") {
  // A1 on {1,2} plus a (3,3) diagonal, A2 on {2,3}.
  SparseSymMatrix q(3);
  SparseSymMatrix a1(3), a2(3);
  a1.insert(1, 1, 1.0);
  a1.insert(1, 2, 1.0);
  a1.insert(2, 2, 1.0);
  a1.insert(3, 3, 1.0);
  a2.insert(2, 2, 1.0);
  a2.insert(2, 3, 1.0);
  a2.insert(3, 3, 1.0);
  ConicProblem p(3, q, {{1, a1}, {2, a2}}, {});
  auto g = aggregated_sparsity(p);
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(2, 3));
  CHECK(!g.has_edge(1, 3));
  auto cliques = maximal_cliques(g);
  REQUIRE(cliques.size() == 2);
  CHECK(cliques[0] == std::vector<Index>{1, 2});
  CHECK(cliques[1] == std::vector<Index>{2, 3});

  // A1 does not fit in either clique; the correlative check must fail on it.
  auto assignment = correlative_sparsity_check(p, cliques);
  CHECK(!assignment.ok());
  REQUIRE(assignment.unassignable.size() == 1);
  CHECK(assignment.unassignable[0] == 1);
  CHECK(assignment.clique_of.at(2) == 2);
}

TEST_CASE("aggregated sparsity covers exactly the nonzero offdiagonals") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 6;
    SparseSymMatrix q(n), c(n);
    std::uniform_int_distribution<Index> idx(1, n);
    for (int e = 0; e < 6; ++e) {
      Index i = idx(rng), j = idx(rng);
      if (i > j) std::swap(i, j);
      try {
        q.insert(i, j, val(rng));
      } catch (...) {
      }
      i = idx(rng);
      j = idx(rng);
      if (i > j) std::swap(i, j);
      try {
        c.insert(i, j, val(rng));
      } catch (...) {
      }
    }
    ConicProblem p(n, q, {{1, c}}, {});
    auto g = aggregated_sparsity(p);
    for (Index i = 1; i <= n; ++i)
      for (Index j = i + 1; j <= n; ++j) {
        bool expected = q.at(i, j) != 0.0 || c.at(i, j) != 0.0;
        CHECK(g.has_edge(i, j) == expected);
      }
  }
}

TEST_CASE("correlative check on a complete single clique") {
  SparseSymMatrix q(3), c(3);
  c.insert(1, 3, 1.0);
  ConicProblem p(3, q, {{7, c}}, {});
  auto assignment = correlative_sparsity_check(p, {{1, 2, 3}});
  CHECK(assignment.ok());
  CHECK(assignment.clique_of.at(7) == 1);
}

TEST_CASE("chordality: 4-cycle is not chordal") {
  SparsityGraph g(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}});
  CHECK(!is_chordal(g).chordal);
}

TEST_CASE("chordality: figure 1(b) plus (10,12) stays chordal") {
  SparsityGraph g = figure_1b();
  g.add_edge(10, 12);
  auto res = is_chordal(g);
  CHECK(res.chordal);
  REQUIRE(res.elimination_order.has_value());
  CHECK(res.elimination_order->size() == 13);
  CHECK(!is_block_clique(g));
}

TEST_CASE("chordality matches cycle enumeration on random graphs") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 4 + static_cast<Index>(u(rng) * 6);  // up to 9
    SparsityGraph g(n);
    for (Index i = 1; i <= n; ++i)
      for (Index j = i + 1; j <= n; ++j)
        if (u(rng) < 0.45) g.add_edge(i, j);
    CHECK(is_chordal(g).chordal == cctest::chordal_by_cycle_enumeration(g));
  }
}

TEST_CASE("maximal cliques of figure 1(a)") {
  auto cliques = maximal_cliques(figure_1a());
  REQUIRE(cliques.size() == 4);
  CHECK(cliques[0] == std::vector<Index>{1, 2, 3, 4});
  CHECK(cliques[1] == std::vector<Index>{3, 5, 6, 7});
  CHECK(cliques[2] == std::vector<Index>{3, 8, 9});
  CHECK(cliques[3] == std::vector<Index>{5, 10, 11});
}

TEST_CASE("maximal cliques of a complete graph") {
  SparsityGraph g(4);
  for (Index i = 1; i <= 4; ++i)
    for (Index j = i + 1; j <= 4; ++j) g.add_edge(i, j);
  auto cliques = maximal_cliques(g);
  REQUIRE(cliques.size() == 1);
  CHECK(cliques[0] == std::vector<Index>{1, 2, 3, 4});
}

TEST_CASE("maximal cliques match subset enumeration on random graphs") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 120; ++trial) {
    const Index n = 3 + static_cast<Index>(u(rng) * 8);  // up to 10
    SparsityGraph g(n);
    for (Index i = 1; i <= n; ++i)
      for (Index j = i + 1; j <= n; ++j)
        if (u(rng) < 0.5) g.add_edge(i, j);
    CHECK(maximal_cliques(g) == cctest::cliques_by_enumeration(g));
  }
}

TEST_CASE("block-clique detection") {
  CHECK(is_block_clique(figure_1a()));
  CHECK(is_block_clique(figure_1b()));
  SparsityGraph single(2, {{1, 2}});
  CHECK(is_block_clique(single));
  SparsityGraph g = figure_1b();
  g.add_edge(10, 12);
  CHECK(!is_block_clique(g));
}

TEST_CASE("smallest extension: block-clique graphs are fixed points") {
  auto g = figure_1a();
  auto ext = smallest_block_clique_extension(g);
  CHECK(ext.edges() == g.edges());
}

TEST_CASE("smallest extension: 4-cycle completes") {
  SparsityGraph g(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}});
  auto ext = smallest_block_clique_extension(g);
  CHECK(ext.edge_count() == 6);
  CHECK(is_block_clique(ext));
}

TEST_CASE("smallest extension of figure 1(b) plus (10,12)") {
  SparsityGraph g = figure_1b();
  g.add_edge(10, 12);
  CHECK(cut_nodes(g) == std::vector<Index>{3});
  auto ext = smallest_block_clique_extension(g);
  CHECK(is_block_clique(ext));
  auto cliques = maximal_cliques(ext);
  REQUIRE(cliques.size() == 3);
  CHECK(cliques[0] == std::vector<Index>{1, 2, 3});
  CHECK(cliques[1] == std::vector<Index>{3, 4, 5, 6, 7});
  CHECK(cliques[2] == std::vector<Index>{3, 8, 9, 10, 11, 12, 13});
  CHECK(cut_nodes(ext) == std::vector<Index>{3});
}

TEST_CASE("extension rejects disconnected graphs") {
  SparsityGraph g(4, {{1, 2}});
  CHECK_THROWS_AS(smallest_block_clique_extension(g), std::invalid_argument);
}

TEST_CASE("extension preserves cut nodes and minimality on random graphs") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int done = 0;
  while (done < 60) {
    const Index n = 4 + static_cast<Index>(u(rng) * 5);
    SparsityGraph g(n);
    for (Index i = 1; i <= n; ++i)
      for (Index j = i + 1; j <= n; ++j)
        if (u(rng) < 0.4) g.add_edge(i, j);
    if (!g.is_connected()) continue;
    ++done;
    auto ext = smallest_block_clique_extension(g);
    CHECK(is_block_clique(ext));
    CHECK(cut_nodes(ext) == cctest::cut_nodes_by_removal(g));
    for (auto [i, j] : g.edges()) CHECK(ext.has_edge(i, j));
  }
}

TEST_CASE("clique tree of figure 1(a) reproduces the worked anchors") {
  auto tree = build_clique_tree(figure_1a(), 1);
  REQUIRE(tree.size() == 4);
  CHECK(tree.clique(1) == std::vector<Index>{1, 2, 3, 4});
  CHECK(tree.clique(2) == std::vector<Index>{3, 5, 6, 7});
  CHECK(tree.clique(3) == std::vector<Index>{3, 8, 9});
  CHECK(tree.clique(4) == std::vector<Index>{5, 10, 11});
  CHECK(tree.anchor.at(2) == 3);
  CHECK(tree.anchor.at(3) == 3);
  CHECK(tree.anchor.at(4) == 5);
  CHECK(tree.parent.at(4) == 2);
  CHECK(tree.satisfies_rip());
}

TEST_CASE("clique tree of a single clique") {
  SparsityGraph g(3);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(1, 3);
  auto tree = build_clique_tree(g);
  CHECK(tree.size() == 1);
  CHECK(tree.parent.empty());
  CHECK(tree.anchor.at(1) == 1);
}

TEST_CASE("clique tree rejects bad inputs") {
  SparsityGraph disconnected(4, {{1, 2}});
  CHECK_THROWS_AS(build_clique_tree(disconnected), std::invalid_argument);
  SparsityGraph cycle(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}});
  CHECK_THROWS_AS(build_clique_tree(cycle), std::invalid_argument);
}

TEST_CASE("random block-clique trees satisfy RIP, chordal bound holds") {
  std::mt19937 rng(59);
  for (int trial = 0; trial < 150; ++trial) {
    auto g = cctest::random_block_clique_graph(rng, 15);
    CHECK(is_block_clique(g));
    auto cliques = maximal_cliques(g);
    CHECK(cliques.size() <= static_cast<std::size_t>(g.n()));
    auto tree = build_clique_tree(g, 1);
    CHECK(tree.satisfies_rip());
    bool found_1 = std::binary_search(tree.clique(1).begin(),
                                      tree.clique(1).end(), Index{1});
    CHECK(found_1);
  }
}

TEST_CASE("extension of any connected graph is block-clique") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int done = 0;
  while (done < 40) {
    const Index n = 5 + static_cast<Index>(u(rng) * 5);
    SparsityGraph g(n);
    for (Index i = 1; i <= n; ++i)
      for (Index j = i + 1; j <= n; ++j)
        if (u(rng) < 0.35) g.add_edge(i, j);
    if (!g.is_connected()) continue;
    ++done;
    CHECK(is_block_clique(smallest_block_clique_extension(g)));
  }
}

}  // TEST_SUITE
