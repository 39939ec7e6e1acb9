#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lisense {

using cplx = std::complex<double>;

/// Integer lattice coordinate. `col` runs along x (width), `row` along y (height).
struct Pixel {
  int col = 0;
  int row = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Dense row-major 2-D array. Index (col, row) maps to data[row * width + col].
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}
  Grid(std::size_t width, std::size_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != width_ * height_) {
      throw std::invalid_argument("Grid: data length does not match width*height");
    }
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t col, std::size_t row) { return data_[row * width_ + col]; }
  const T& operator()(std::size_t col, std::size_t row) const { return data_[row * width_ + col]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  bool contains(int col, int row) const {
    return col >= 0 && row >= 0 && static_cast<std::size_t>(col) < width_ &&
           static_cast<std::size_t>(row) < height_;
  }

  bool same_shape(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

using ComplexGrid = Grid<cplx>;
using RealGrid = Grid<double>;
using ByteGrid = Grid<std::uint8_t>;

}  // namespace lisense
