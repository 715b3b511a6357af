#include "offdetect/sparse.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "offdetect/error.h"

namespace offdetect {

SparseVector::SparseVector(std::vector<SparseEntry> entries, size_t dim)
    : entries_(std::move(entries)), dim_(dim) {
  for (size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.index >= dim_) {
      throw Error(ErrorKind::kDimMismatch,
                  "sparse index " + std::to_string(e.index) +
                      " out of range for dim " + std::to_string(dim_));
    }
    if (i > 0 && entries_[i - 1].index >= e.index) {
      throw Error(ErrorKind::kInvalidArgument,
                  "sparse indices must be strictly increasing");
    }
    if (e.value == 0.0 || !std::isfinite(e.value)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "sparse values must be finite and nonzero");
    }
  }
}

SparseVector SparseVector::FromUnsorted(std::vector<SparseEntry> entries,
                                        size_t dim) {
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.index < b.index;
            });
  std::vector<SparseEntry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().index == e.index) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const SparseEntry& e) { return e.value == 0.0; });
  return SparseVector(std::move(merged), dim);
}

double SparseVector::At(uint32_t index) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const SparseEntry& e, uint32_t i) { return e.index < i; });
  return (it != entries_.end() && it->index == index) ? it->value : 0.0;
}

double SparseVector::Dot(std::span<const double> dense) const {
  if (dense.size() != dim_) {
    throw Error(ErrorKind::kDimMismatch,
                "vector dim " + std::to_string(dim_) + " vs weights " +
                    std::to_string(dense.size()));
  }
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.value * dense[e.index];
  return sum;
}

double SparseVector::Norm() const {
  double sq = 0.0;
  for (const auto& e : entries_) sq += e.value * e.value;
  return std::sqrt(sq);
}

SparseVector SparseVector::Scaled(double factor) const {
  std::vector<SparseEntry> out = entries_;
  for (auto& e : out) e.value *= factor;
  std::erase_if(out, [](const SparseEntry& e) { return e.value == 0.0; });
  return SparseVector(std::move(out), dim_);
}

std::string SparseVector::DebugString() const {
  std::string out;
  char buf[64];
  for (const auto& e : entries_) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(e.index);
    out.push_back(':');
    const auto res = std::to_chars(buf, buf + sizeof(buf), e.value);
    out.append(buf, res.ptr);
  }
  return out;
}

SparseVector Combine(const SparseVector& left, const SparseVector& right) {
  const size_t dim = left.dim() + right.dim();
  if (dim > UINT32_MAX) {
    throw Error(ErrorKind::kDimMismatch, "combined dimension too large");
  }
  std::vector<SparseEntry> entries = left.entries();
  entries.reserve(left.nnz() + right.nnz());
  const auto offset = static_cast<uint32_t>(left.dim());
  for (const auto& e : right.entries()) {
    entries.push_back({e.index + offset, e.value});
  }
  return SparseVector(std::move(entries), dim);
}

}  // namespace offdetect
