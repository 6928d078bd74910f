#include "strz/groundstate.hpp"

#include "strz/error.hpp"
#include "strz/fft.hpp"
#include "strz/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace strz {

namespace {

// (-Δ + I)⁻¹ applied in Fourier space; input and output real.
class HelmholtzInverse {
 public:
  explicit HelmholtzInverse(const Grid& grid) : grid_(grid), k2_(grid.wavenumber_squared()) {}

  void apply(std::vector<Complex>& u) const {
    fft::forward(u, grid_);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] /= 1.0 + k2_[i];
    fft::inverse(u, grid_);
    for (auto& v : u) v = v.real();
  }

 private:
  Grid grid_;
  std::vector<double> k2_;
};

double weighted_mass(const std::vector<Complex>& f, const ComplexField& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i].real() * f[i].real() * f[i].real();
  return s * w.grid().cell_volume();
}

double spectral_tail(const ComplexField& f) {
  std::vector<Complex> hat(f.values().begin(), f.values().end());
  fft::forward(hat, f.grid());
  const auto k2 = f.grid().wavenumber_squared();
  const double nyq = M_PI / f.grid().spacing();
  const double cut = 0.25 * nyq * nyq;
  double hi = 0.0, all = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double e = std::norm(hat[i]);
    all += e;
    if (k2[i] > cut) hi += e;
  }
  return all > 0 ? hi / all : 0.0;
}

}  // namespace

double euler_lagrange_residual(const ComplexField& f, const ComplexField& w, double mu) {
  ComplexField r = laplacian(f);
  r *= -1.0;
  r += f;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= mu * w[i] * f[i];
  const double nf = lq_norm(f, 2.0);
  return nf > 0 ? lq_norm(r, 2.0) / nf : lq_norm(r, 2.0);
}

ComplexField gaussian_weight(const Grid& grid, double amplitude, double width, std::array<double, 3> center) {
  if (!(width > 0)) fail(ErrorKind::Precondition, "Gaussian width must be positive");
  return ComplexField::from_function(grid, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    const double v = std::exp(-r2 / (width * width));
    return v < 1e-300 ? 0.0 : amplitude * v;
  });
}

GroundPair ground_pair(const ComplexField& w, const GroundOptions& options) {
  if (!w.is_real()) fail(ErrorKind::Precondition, "constraint weight w must be real-valued");
  w.check_finite();
  const Grid& grid = w.grid();
  double wmax = -std::numeric_limits<double>::infinity(), wneg = 0.0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = w[i].real();
    if (v > wmax) {
      wmax = v;
      argmax = i;
    }
    wneg = std::max(wneg, -v);
  }
  if (!(wmax > 0)) fail(ErrorKind::EmptyConstraint, "w <= 0 everywhere, so the constraint set is empty");

  // Eigenvalues of (-Δ+I)⁻¹w lie in [-wneg, wmax]; the shift makes the top
  // positive one dominant in magnitude.
  const double shift = wneg;
  HelmholtzInverse solve(grid);
  std::vector<Complex> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::max(w[i].real(), 0.0) + 1e-3 * std::max(wmax, 0.0);

  auto normalize = [&](std::vector<Complex>& g) {
    const double m = weighted_mass(g, w);
    if (!(m > 0)) fail(ErrorKind::Convergence, "iterate lost positive weighted mass");
    const double c = 1.0 / std::sqrt(m);
    for (auto& v : g) v *= c;
  };
  normalize(f);

  GroundPair gp{0.0, ComplexField(grid), w, 0.0, 0, 0.0};
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::vector<Complex> g(grid.size());
  for (int it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = w[i].real() * f[i];
    solve.apply(g);
    for (std::size_t i = 0; i < f.size(); ++i) g[i] += shift * f[i];
    normalize(g);
    f.swap(g);

    ComplexField field(grid, f);
    const double mu = gradient_energy(field) + std::pow(lq_norm(field, 2.0), 2);
    const double res = euler_lagrange_residual(field, w, mu);
    bool stalled = false;
    if (res < best * (1 - 1e-3)) {
      best = res;
      since_best = 0;
    } else {
      stalled = ++since_best > options.patience;
    }
    const bool done = res < options.tol || ((stalled || it == options.max_iterations) && res < options.accept);
    if (done) {
      if (field[argmax].real() < 0) field *= -1.0;
      gp.mu = mu;
      gp.residual = res;
      gp.iterations = it;
      gp.spectral_tail = spectral_tail(field);
      gp.f = std::move(field);
      return gp;
    }
    if (stalled) fail(ErrorKind::Convergence, "ground-state iteration stagnated at residual " + std::to_string(res));
  }
  fail(ErrorKind::Convergence, "ground-state iteration reached the iteration cap");
}

StandingWave standing_wave_potential(const GroundPair& gp) {
  ComplexField W = gp.w;
  W *= -gp.mu;
  ComplexField r = laplacian(gp.f);
  r *= -1.0;
  r += gp.f;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += W[i] * gp.f[i];
  const double nf = lq_norm(gp.f, 2.0);
  return {std::move(W), gp.f, nf > 0 ? lq_norm(r, 2.0) / nf : 0.0};
}

}  // namespace strz
