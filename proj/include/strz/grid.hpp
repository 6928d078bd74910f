#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace strz {

using Complex = std::complex<double>;

/// Periodic box [-L, L)^n sampled with N points per axis.
class Grid {
 public:
  /// Throws Error(DimensionOutOfRange) for n outside {1,2,3} and
  /// Error(Precondition) unless L > 0 and N is a power of two >= 8.
  Grid(int dim, double half_width, int points);

  int dim() const noexcept { return dim_; }
  double half_width() const noexcept { return half_width_; }
  int points() const noexcept { return points_; }
  double spacing() const noexcept { return 2 * half_width_ / points_; }
  double cell_volume() const noexcept;
  std::size_t size() const noexcept { return size_; }

  double coordinate(int j) const noexcept { return -half_width_ + j * spacing(); }
  /// Angular wavenumber of DFT index k (FFT ordering, Nyquist mapped to -N/2).
  double wavenumber(int k) const noexcept;

  /// Coordinates of the point with flat (row-major) index `idx`; unused axes are 0.
  std::array<double, 3> point(std::size_t idx) const noexcept;
  /// |ξ|² for every flat index, in FFT ordering.
  std::vector<double> wavenumber_squared() const;
  /// Same grid with half-width multiplied by `factor`.
  Grid scaled(double factor) const;

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.dim_ == b.dim_ && a.points_ == b.points_ && a.half_width_ == b.half_width_;
  }

 private:
  int dim_;
  double half_width_;
  int points_;
  std::size_t size_;
};

inline Grid make_grid(int n, double half_width, int points) { return Grid(n, half_width, points); }

/// Complex-valued samples on a Grid, row-major (last axis fastest).
class ComplexField {
 public:
  explicit ComplexField(Grid grid);
  /// Throws Error(Precondition) on size mismatch or non-finite values.
  ComplexField(Grid grid, std::vector<Complex> values);

  template <class F>
  static ComplexField from_function(const Grid& grid, F&& f) {
    std::vector<Complex> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = Complex(f(grid.point(i)));
    return ComplexField(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const Complex> values() const noexcept { return values_; }
  std::span<Complex> values() noexcept { return values_; }
  const std::vector<Complex>& data() const noexcept { return values_; }

  Complex& operator[](std::size_t i) noexcept { return values_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Throws Error(Precondition) if any sample is NaN or infinite.
  void check_finite() const;
  bool is_real(double tol = 0.0) const noexcept;
  /// Same samples reinterpreted on another grid with the same N and n.
  ComplexField on_grid(const Grid& other) const;

  ComplexField& operator+=(const ComplexField& o);
  ComplexField& operator-=(const ComplexField& o);
  ComplexField& operator*=(Complex a) noexcept;

  friend ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
  friend ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
  friend ComplexField operator*(Complex a, ComplexField b) { return b *= a; }

 private:
  Grid grid_;
  std::vector<Complex> values_;
};

}  // namespace strz
