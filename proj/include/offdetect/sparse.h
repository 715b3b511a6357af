#ifndef OFFDETECT_SPARSE_H_
#define OFFDETECT_SPARSE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace offdetect {

struct SparseEntry {
  uint32_t index;
  double value;

  bool operator==(const SparseEntry&) const = default;
};

// Sparse feature vector: strictly increasing indices, all < dim, no stored
// zeros. The constructor enforces the invariant.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(size_t dim) : dim_(dim) {}
  SparseVector(std::vector<SparseEntry> entries, size_t dim);

  // Sorts, sums duplicate indices and drops zeros.
  static SparseVector FromUnsorted(std::vector<SparseEntry> entries,
                                   size_t dim);

  const std::vector<SparseEntry>& entries() const { return entries_; }
  size_t dim() const { return dim_; }
  size_t nnz() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }

  // Value at `index`, 0 when absent. O(log nnz).
  double At(uint32_t index) const;
  double Dot(std::span<const double> dense) const;
  double Norm() const;
  SparseVector Scaled(double factor) const;

  // `index:value` pairs separated by single spaces.
  std::string DebugString() const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<SparseEntry> entries_;
  size_t dim_ = 0;
};

// Concatenation; indices of `right` are offset by left.dim().
SparseVector Combine(const SparseVector& left, const SparseVector& right);

}  // namespace offdetect

#endif  // OFFDETECT_SPARSE_H_
