#ifndef CLIQUECOP_TESTS_GENERATORS_HPP
#define CLIQUECOP_TESTS_GENERATORS_HPP

#include <random>
#include <vector>

#include "cliquecop/clique_solver.hpp"

namespace cctest {

using cliquecop::ConicProblem;
using cliquecop::Index;
using cliquecop::SparsityGraph;

// Random connected block-clique graph on up to n_max nodes built by gluing
// random cliques (sizes 2..max_clique) at single existing vertices.
SparsityGraph random_block_clique_graph(std::mt19937& rng, Index n_max,
                                        Index max_clique = 4);

// Random chordal but NOT block-clique graph: two cliques glued on a
// 2-vertex separator plus optional extra pendant cliques.
SparsityGraph random_non_block_clique_chordal(std::mt19937& rng, Index n_max);

struct InstanceOptions {
  Index n_max = 12;
  Index max_clique = 4;
  bool with_complementarity = false;
  // per-clique linear equality uses a negative anchor coefficient and
  // positive coefficients elsewhere, making Psi(Gamma, 0) = {O} and every
  // feasible set compact.
};

struct RandomInstance {
  ConicProblem problem;
  SparsityGraph graph;
};

// Feasible, bounded COP on a random block-clique graph in the style of the
// worked examples: one a a^T linear-equality constraint per clique, an
// optional complementarity pair, and a random symmetric objective supported
// on the cliques.
RandomInstance random_instance(std::mt19937& rng, const InstanceOptions& opt);

// Consistent family of DNN blocks on the cliques of a tree, obtained by
// restricting a random completely positive global matrix.
std::vector<cliquecop::BlockSolution> random_consistent_dnn_blocks(
    std::mt19937& rng, const cliquecop::CliqueTree& tree, Index n);

}  // namespace cctest

#endif
