#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mdslab/error.hpp"

namespace mdslab {

using Complex = std::complex<double>;
using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);

inline std::size_t shape_elements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::size_t b) { return a * b; });
}

// Dense row-major tensor with value semantics.
template <class T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{})
      : shape_(std::move(shape)), data_(shape_elements(shape_), fill) {
    compute_strides();
  }
  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    require(data_.size() == shape_elements(shape_), ErrorCode::kShapeMismatch,
            "tensor data length does not match shape " + shape_to_string(shape_));
    compute_strides();
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t stride(std::size_t axis) const { return strides_.at(axis); }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  template <class... I>
  T& operator()(I... idx) noexcept {
    return data_[offset(idx...)];
  }
  template <class... I>
  const T& operator()(I... idx) const noexcept {
    return data_[offset(idx...)];
  }

  bool operator==(const Tensor& other) const = default;

 private:
  template <class... I>
  std::size_t offset(I... idx) const noexcept {
    const std::size_t indices[] = {static_cast<std::size_t>(idx)...};
    std::size_t off = 0;
    for (std::size_t a = 0; a < sizeof...(I); ++a) off += indices[a] * strides_[a];
    return off;
  }

  void compute_strides() {
    strides_.assign(shape_.size(), 1);
    for (std::size_t a = shape_.size(); a-- > 1;) strides_[a - 1] = strides_[a] * shape_[a];
  }

  Shape shape_;
  std::vector<std::size_t> strides_;
  std::vector<T> data_;
};

using CTensor = Tensor<Complex>;
using RTensor = Tensor<double>;

}  // namespace mdslab
