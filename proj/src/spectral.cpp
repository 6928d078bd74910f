#include "strz/spectral.hpp"

#include "strz/error.hpp"
#include "strz/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace strz {

// --- Grid ------------------------------------------------------------------

Grid::Grid(int dim, double half_width, int points)
    : dim_(dim), half_width_(half_width), points_(points), size_(1) {
  if (dim < 1 || dim > 3)
    fail(ErrorKind::DimensionOutOfRange, "grid dimension must be 1, 2 or 3; got " + std::to_string(dim));
  if (!(half_width > 0) || !std::isfinite(half_width))
    fail(ErrorKind::Precondition, "grid half-width must be positive and finite");
  if (points < 8 || (points & (points - 1)) != 0)
    fail(ErrorKind::Precondition, "points per axis must be a power of two >= 8; got " + std::to_string(points));
  for (int d = 0; d < dim; ++d) size_ *= static_cast<std::size_t>(points);
}

double Grid::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

double Grid::wavenumber(int k) const noexcept {
  const int m = k < points_ / 2 ? k : k - points_;
  return std::numbers::pi / half_width_ * m;
}

std::array<double, 3> Grid::point(std::size_t idx) const noexcept {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int d = dim_ - 1; d >= 0; --d) {
    x[d] = coordinate(static_cast<int>(idx % points_));
    idx /= points_;
  }
  return x;
}

std::vector<double> Grid::wavenumber_squared() const {
  std::vector<double> k2(points_);
  for (int k = 0; k < points_; ++k) k2[k] = wavenumber(k) * wavenumber(k);
  std::vector<double> out(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    std::size_t idx = i;
    double s = 0.0;
    for (int d = 0; d < dim_; ++d) {
      s += k2[idx % points_];
      idx /= points_;
    }
    out[i] = s;
  }
  return out;
}

Grid Grid::scaled(double factor) const { return Grid(dim_, half_width_ * factor, points_); }

// --- ComplexField ----------------------------------------------------------

ComplexField::ComplexField(Grid grid) : grid_(grid), values_(grid.size()) {}

ComplexField::ComplexField(Grid grid, std::vector<Complex> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    fail(ErrorKind::Precondition, "field size " + std::to_string(values_.size()) + " does not match grid size " +
                                      std::to_string(grid_.size()));
  check_finite();
}

void ComplexField::check_finite() const {
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorKind::Precondition, "field contains non-finite values");
}

bool ComplexField::is_real(double tol) const noexcept {
  return std::all_of(values_.begin(), values_.end(), [tol](const Complex& v) { return std::abs(v.imag()) <= tol; });
}

ComplexField ComplexField::on_grid(const Grid& other) const {
  if (other.dim() != grid_.dim() || other.points() != grid_.points())
    fail(ErrorKind::Precondition, "on_grid needs the same dimension and point count");
  ComplexField out(other);
  out.values_ = values_;
  return out;
}

ComplexField& ComplexField::operator+=(const ComplexField& o) {
  if (!(o.grid_ == grid_)) fail(ErrorKind::Precondition, "field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& o) {
  if (!(o.grid_ == grid_)) fail(ErrorKind::Precondition, "field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ComplexField& ComplexField::operator*=(Complex a) noexcept {
  for (auto& v : values_) v *= a;
  return *this;
}

// --- BoxGuard --------------------------------------------------------------

double BoxGuard::shell_mass_fraction(const ComplexField& u) const {
  const Grid& g = u.grid();
  const double edge = (1.0 - shell_fraction) * g.half_width();
  double total = 0.0, shell = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double m = std::norm(u[i]);
    total += m;
    auto x = g.point(i);
    bool outer = false;
    for (int d = 0; d < g.dim(); ++d) outer = outer || std::abs(x[d]) > edge;
    if (outer) shell += m;
  }
  return total > 0 ? shell / total : 0.0;
}

void BoxGuard::check(const ComplexField& u, const std::string& context) const {
  const double frac = shell_mass_fraction(u);
  if (frac > tolerance)
    fail(ErrorKind::SupportEscape, context + ": mass fraction " + std::to_string(frac) +
                                       " in the outer shell exceeds " + std::to_string(tolerance));
}

// --- propagation and derivatives -------------------------------------------

FreePropagator::FreePropagator(const Grid& grid, double tau) : grid_(grid), tau_(tau) {
  auto k2 = grid.wavenumber_squared();
  multiplier_.resize(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) multiplier_[i] = std::polar(1.0, tau * k2[i]);
}

void FreePropagator::apply(std::span<Complex> u) const {
  fft::forward(u, grid_);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= multiplier_[i];
  fft::inverse(u, grid_);
}

void FreePropagator::apply(ComplexField& u) const {
  if (!(u.grid() == grid_)) fail(ErrorKind::Precondition, "propagator grid mismatch");
  apply(u.values());
}

ComplexField free_propagate(const ComplexField& u, double t) {
  if (!std::isfinite(t)) fail(ErrorKind::Precondition, "propagation time must be finite");
  ComplexField out = u;
  if (t == 0.0) return out;
  FreePropagator(u.grid(), t).apply(out);
  return out;
}

ComplexField laplacian(const ComplexField& u) {
  ComplexField out = u;
  auto k2 = u.grid().wavenumber_squared();
  fft::forward(out.values(), u.grid());
  for (std::size_t i = 0; i < k2.size(); ++i) out[i] *= -k2[i];
  fft::inverse(out.values(), u.grid());
  return out;
}

ComplexField partial_derivative(const ComplexField& u, int axis) {
  const Grid& g = u.grid();
  if (axis < 0 || axis >= g.dim()) fail(ErrorKind::Precondition, "derivative axis out of range");
  ComplexField out = u;
  fft::forward(out.values(), g);
  const int n = g.points();
  std::size_t stride = 1;
  for (int d = g.dim() - 1; d > axis; --d) stride *= n;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int k = static_cast<int>((i / stride) % n);
    const double xi = (k == n / 2) ? 0.0 : g.wavenumber(k);
    out[i] *= Complex(0.0, xi);
  }
  fft::inverse(out.values(), g);
  return out;
}

Complex inner_product(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) fail(ErrorKind::Precondition, "field grids differ");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * a.grid().cell_volume();
}

double gradient_energy(const ComplexField& u) {
  return -inner_product(u, laplacian(u)).real();
}

double lq_norm(const ComplexField& u, double q) {
  if (!(q >= 1.0)) fail(ErrorKind::Precondition, "L^q norm needs q >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (const auto& v : u.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (q == 2.0) {
    for (const auto& v : u.values()) s += std::norm(v);
  } else if (q == 4.0) {
    for (const auto& v : u.values()) s += std::norm(v) * std::norm(v);
  } else if (q == 6.0) {
    for (const auto& v : u.values()) {
      const double a = std::norm(v);
      s += a * a * a;
    }
  } else if (q == 8.0) {
    for (const auto& v : u.values()) {
      const double a = std::norm(v) * std::norm(v);
      s += a * a;
    }
  } else {
    for (const auto& v : u.values()) s += std::pow(std::abs(v), q);
  }
  return std::pow(s * u.grid().cell_volume(), 1.0 / q);
}

double lq_norm(const ComplexField& u, const ExtExponent& q) { return lq_norm(u, q.to_double()); }

// --- band-limited resampling -----------------------------------------------

namespace {

// Row j holds the weights that evaluate the periodic band-limited interpolant
// (symmetric Nyquist term) of samples on `src` at target point y_j.
std::vector<double> interpolation_matrix(const Grid& src, std::span<const double> targets) {
  const int ns = src.points();
  const double h = src.spacing();
  const double L = src.half_width();
  std::vector<double> a(targets.size() * ns, 0.0);
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const double y = targets[j];
    if (y < -L || y >= L) continue;
    for (int l = 0; l < ns; ++l) {
      const double m = (y - src.coordinate(l)) / h;
      const double mr = std::round(m);
      double w;
      if (std::abs(m - mr) < 1e-12) {
        w = (static_cast<long long>(mr) % ns == 0) ? 1.0 : 0.0;
      } else {
        const double theta = std::numbers::pi * m * h / L;
        w = std::sin(ns * theta / 2) / std::tan(theta / 2) / ns;
      }
      a[j * ns + l] = w;
    }
  }
  return a;
}

// Applies an (nt x ns) matrix along `axis` of a row-major array whose axes
// all have extent ns except those already transformed (extent nt).
std::vector<Complex> apply_axis(const std::vector<Complex>& in, std::array<int, 3> shape, int dim, int axis,
                                const std::vector<double>& a, int nt) {
  const int ns = shape[axis];
  std::size_t outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= shape[d];
  for (int d = axis + 1; d < dim; ++d) inner *= shape[d];
  std::vector<Complex> out(outer * nt * inner, Complex(0.0));
  for (std::size_t o = 0; o < outer; ++o) {
    const Complex* src = in.data() + o * ns * inner;
    Complex* dst = out.data() + o * nt * inner;
    for (int j = 0; j < nt; ++j) {
      Complex* row = dst + j * inner;
      for (int l = 0; l < ns; ++l) {
        const double w = a[static_cast<std::size_t>(j) * ns + l];
        if (w == 0.0) continue;
        const Complex* col = src + l * inner;
        for (std::size_t i = 0; i < inner; ++i) row[i] += w * col[i];
      }
    }
  }
  return out;
}

}  // namespace

ComplexField resample_scaled(const ComplexField& f, const Grid& target, double eps) {
  const Grid& src = f.grid();
  if (src.dim() != target.dim()) fail(ErrorKind::Precondition, "resample: dimension mismatch");
  if (!(eps > 0) || !std::isfinite(eps)) fail(ErrorKind::Precondition, "resample: scale must be positive");
  std::vector<double> ys(target.points());
  for (int j = 0; j < target.points(); ++j) ys[j] = eps * target.coordinate(j);
  auto a = interpolation_matrix(src, ys);
  std::array<int, 3> shape{src.points(), src.points(), src.points()};
  std::vector<Complex> v = f.data();
  for (int axis = 0; axis < src.dim(); ++axis) {
    v = apply_axis(v, shape, src.dim(), axis, a, target.points());
    shape[axis] = target.points();
  }
  return ComplexField(target, std::move(v));
}

ComplexField rescale_field(const ComplexField& f, double eps, const BoxGuard& guard) {
  ComplexField out = (eps == 1.0) ? f : resample_scaled(f, f.grid(), eps);
  guard.check(out, "rescale_field(eps = " + std::to_string(eps) + ")");
  return out;
}

// --- dispersive decay ------------------------------------------------------

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::Precondition, "slope fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) fail(ErrorKind::Precondition, "slope fit needs distinct abscissae");
  return sxy / sxx;
}

DecayFit dispersive_decay_fit(const ComplexField& u0, std::span<const double> times, const BoxGuard& guard) {
  DecayFit fit;
  fit.predicted = -0.5 * u0.grid().dim();
  std::vector<double> lx, ly;
  for (double t : times) {
    if (!(t > 0)) fail(ErrorKind::Precondition, "decay fit needs positive times");
    ComplexField u = free_propagate(u0, t);
    guard.check(u, "dispersive decay at t = " + std::to_string(t));
    const double sup = lq_norm(u, std::numeric_limits<double>::infinity());
    fit.times.push_back(t);
    fit.sup_norms.push_back(sup);
    lx.push_back(std::log(t));
    ly.push_back(std::log(sup));
  }
  fit.slope = least_squares_slope(lx, ly);
  return fit;
}

}  // namespace strz
