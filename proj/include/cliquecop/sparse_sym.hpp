#ifndef CLIQUECOP_SPARSE_SYM_HPP
#define CLIQUECOP_SPARSE_SYM_HPP

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace cliquecop {

// Index type for matrix/vector positions.  All public interfaces are
// 1-based; X_11 is the homogenization entry.
using Index = int;

struct Triplet {
  Index i;  // 1-based, i <= j
  Index j;
  double v;
};

// Symmetric matrix in upper-triangle coordinate form.  Entries are unique
// per (i,j) key with i <= j; reading (j,i) returns the (i,j) value.
class SparseSymMatrix {
 public:
  explicit SparseSymMatrix(Index dim);
  // Builds from triplets; (i,j) with i > j are normalized to (j,i).
  SparseSymMatrix(Index dim, const std::vector<Triplet>& entries);

  Index dim() const { return dim_; }
  const std::vector<Triplet>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // Adds v at (i,j); throws if the normalized key already exists.
  void insert(Index i, Index j, double v);

  // Value at (i,j) in either orientation; 0 when absent.
  double at(Index i, Index j) const;

  // Symmetric inner product <A, X> = trace(AX), traversing this matrix's
  // entries (off-diagonal entries weighted by 2).
  double inner(const SparseSymMatrix& x) const;

  // True if all entries lie on the diagonal.
  bool is_diagonal() const;

  // True if every entry (i,j) has both i and j inside the set (given as a
  // sorted vector of 1-based indices).
  bool supported_on(const std::vector<Index>& nodes) const;

  // Sorted list of indices touched by at least one entry.
  std::vector<Index> support_nodes() const;

  double frobenius_norm() const;

 private:
  void check_index(Index i, Index j) const;

  Index dim_;
  std::vector<Triplet> entries_;
  std::map<std::pair<Index, Index>, std::size_t> pos_;
};

}  // namespace cliquecop

#endif
