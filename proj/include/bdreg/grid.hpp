#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <vector>

#include "bdreg/errors.hpp"

namespace bdreg {

/// Dense row-major 2-D array. Pixel (row, col) has its center at
/// (col + 0.5, row + 0.5) in image coordinates.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw ParameterError("grid dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  T& operator()(int row, int col) noexcept { return data_[index(row, col)]; }
  const T& operator()(int row, int col) const noexcept { return data_[index(row, col)]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid& a, const Grid& b) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Binary per-pixel grid; nonzero means set.
using RasterMask = Grid<std::uint8_t>;
using FloatMap = Grid<float>;
using LabelMap = Grid<std::int32_t>;

/// Two aligned float planes (x and y components of a per-pixel vector).
struct VectorField {
  FloatMap x;
  FloatMap y;

  VectorField() = default;
  VectorField(int width, int height) : x(width, height), y(width, height) {}

  int width() const noexcept { return x.width(); }
  int height() const noexcept { return x.height(); }

  friend bool operator==(const VectorField&, const VectorField&) = default;
};

inline std::size_t count_set(const RasterMask& m) {
  return static_cast<std::size_t>(
      std::count_if(m.values().begin(), m.values().end(), [](auto v) { return v != 0; }));
}

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    std::ostringstream os;
    os << what << ": shape mismatch " << a.width() << "x" << a.height() << " vs " << b.width()
       << "x" << b.height();
    throw ShapeError(os.str());
  }
}

}  // namespace bdreg
