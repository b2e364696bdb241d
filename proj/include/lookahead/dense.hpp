#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lookahead {

/// Row-major dense array of fixed rank. Indices are zero-based.
template <typename T, std::size_t Rank>
class DenseArray {
 public:
  using Shape = std::array<std::size_t, Rank>;

  DenseArray() { shape_.fill(0); stride_.fill(0); }

  explicit DenseArray(Shape shape, T fill = T{}) : shape_(shape) {
    std::size_t n = 1;
    for (std::size_t k = Rank; k-- > 0;) {
      stride_[k] = n;
      n *= shape_[k];
    }
    data_.assign(n, fill);
  }

  template <typename... I>
  T& operator()(I... idx) {
    return data_[offset(idx...)];
  }

  template <typename... I>
  const T& operator()(I... idx) const {
    return data_[offset(idx...)];
  }

  const Shape& shape() const { return shape_; }
  std::size_t extent(std::size_t k) const { return shape_[k]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::vector<T>& flat() { return data_; }
  const std::vector<T>& flat() const { return data_; }

  /// Contiguous trailing slice obtained by fixing the leading indices.
  template <typename... I>
  std::span<const T> slice(I... lead) const {
    static_assert(sizeof...(I) < Rank);
    std::size_t off = 0, k = 0;
    ((off += static_cast<std::size_t>(lead) * stride_[k++]), ...);
    return {data_.data() + off, stride_[sizeof...(I) - 1]};
  }

  template <typename... I>
  std::span<T> slice(I... lead) {
    static_assert(sizeof...(I) < Rank);
    std::size_t off = 0, k = 0;
    ((off += static_cast<std::size_t>(lead) * stride_[k++]), ...);
    return {data_.data() + off, stride_[sizeof...(I) - 1]};
  }

  bool operator==(const DenseArray& o) const {
    return shape_ == o.shape_ && data_ == o.data_;
  }

 private:
  template <typename... I>
  std::size_t offset(I... idx) const {
    static_assert(sizeof...(I) == Rank, "wrong number of indices");
    std::size_t off = 0, k = 0;
    ((off += static_cast<std::size_t>(idx) * stride_[k++]), ...);
    return off;
  }

  Shape shape_;
  Shape stride_;
  std::vector<T> data_;
};

using Array2 = DenseArray<double, 2>;
using Array3 = DenseArray<double, 3>;
using Array4 = DenseArray<double, 4>;
using IntArray2 = DenseArray<int, 2>;

}  // namespace lookahead
