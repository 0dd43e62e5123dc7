#include "cliquecop/sparse_sym.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace cliquecop {

SparseSymMatrix::SparseSymMatrix(Index dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("SparseSymMatrix: dim < 1");
}

SparseSymMatrix::SparseSymMatrix(Index dim, const std::vector<Triplet>& entries)
    : SparseSymMatrix(dim) {
  for (const auto& t : entries) insert(t.i, t.j, t.v);
}

void SparseSymMatrix::check_index(Index i, Index j) const {
  if (i < 1 || i > dim_ || j < 1 || j > dim_)
    throw std::out_of_range("SparseSymMatrix: index (" + std::to_string(i) +
                            "," + std::to_string(j) + ") outside [1," +
                            std::to_string(dim_) + "]");
}

void SparseSymMatrix::insert(Index i, Index j, double v) {
  check_index(i, j);
  if (i > j) std::swap(i, j);
  auto key = std::make_pair(i, j);
  if (pos_.count(key))
    throw std::invalid_argument("SparseSymMatrix: duplicate entry (" +
                                std::to_string(i) + "," + std::to_string(j) +
                                ")");
  pos_[key] = entries_.size();
  entries_.push_back({i, j, v});
}

double SparseSymMatrix::at(Index i, Index j) const {
  check_index(i, j);
  if (i > j) std::swap(i, j);
  auto it = pos_.find({i, j});
  return it == pos_.end() ? 0.0 : entries_[it->second].v;
}

double SparseSymMatrix::inner(const SparseSymMatrix& x) const {
  if (x.dim() != dim_)
    throw std::invalid_argument("inner: dimension mismatch");
  double s = 0.0;
  for (const auto& t : entries_) {
    double w = (t.i == t.j) ? 1.0 : 2.0;
    s += w * t.v * x.at(t.i, t.j);
  }
  return s;
}

bool SparseSymMatrix::is_diagonal() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Triplet& t) { return t.i == t.j; });
}

bool SparseSymMatrix::supported_on(const std::vector<Index>& nodes) const {
  for (const auto& t : entries_) {
    if (!std::binary_search(nodes.begin(), nodes.end(), t.i)) return false;
    if (!std::binary_search(nodes.begin(), nodes.end(), t.j)) return false;
  }
  return true;
}

std::vector<Index> SparseSymMatrix::support_nodes() const {
  std::set<Index> s;
  for (const auto& t : entries_) {
    s.insert(t.i);
    s.insert(t.j);
  }
  return {s.begin(), s.end()};
}

double SparseSymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& t : entries_) {
    double w = (t.i == t.j) ? 1.0 : 2.0;
    s += w * t.v * t.v;
  }
  return std::sqrt(s);
}

}  // namespace cliquecop
