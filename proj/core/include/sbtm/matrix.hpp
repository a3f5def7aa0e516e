#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

namespace sbtm {

/// Dense row-major matrix, minimal interface.
template <class T>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  const T& operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  int rows_, cols_;
  std::vector<T> data_;
};

/// Symmetric values indexed by unordered label pairs {g,h} with 1 <= g,h <= k.
/// Storage is the upper triangle; at(g,h) and at(h,g) alias the same entry.
template <class T>
class BlockPairs {
 public:
  BlockPairs() : k_(0) {}
  explicit BlockPairs(int k, T fill = T{})
      : k_(k), data_(static_cast<size_t>(k) * (k + 1) / 2, fill) {}

  int k() const { return k_; }

  T& at(int g, int h) { return data_[index(g, h)]; }
  const T& at(int g, int h) const { return data_[index(g, h)]; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const BlockPairs&) const = default;

  /// Flat index of the unordered pair; also used as a scratch-table key.
  size_t index(int g, int h) const {
    assert(g >= 1 && g <= k_ && h >= 1 && h <= k_);
    int a = std::min(g, h) - 1;
    int b = std::max(g, h) - 1;
    // row a of the upper triangle starts after a*(2k-a+1)/2 entries
    return static_cast<size_t>(a) * (2 * k_ - a - 1) / 2 + b;
  }
  size_t size() const { return data_.size(); }

 private:
  int k_;
  std::vector<T> data_;
};

}  // namespace sbtm
