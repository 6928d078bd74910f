#pragma once

#include "strz/exponents.hpp"
#include "strz/grid.hpp"

#include <span>
#include <string>
#include <vector>

namespace strz {

/// Domain-truncation contract: the fraction of L² mass found in the outer
/// shell max_i |x_i| > (1 - shell_fraction) L must stay below `tolerance`.
struct BoxGuard {
  double shell_fraction = 0.1;
  double tolerance = 1e-8;

  double shell_mass_fraction(const ComplexField& u) const;
  /// Throws Error(SupportEscape) mentioning `context`.
  void check(const ComplexField& u, const std::string& context) const;
};

/// e^{itΔ} for i∂ₜu - Δu = 0: Fourier multiplier e^{+it|ξ|²}.
ComplexField free_propagate(const ComplexField& u, double t);

/// Precomputed multiplier e^{+iτ|ξ|²} for repeated steps of length τ.
class FreePropagator {
 public:
  FreePropagator(const Grid& grid, double tau);
  void apply(ComplexField& u) const;
  void apply(std::span<Complex> u) const;
  double step() const noexcept { return tau_; }
  const Grid& grid() const noexcept { return grid_; }

 private:
  Grid grid_;
  double tau_;
  std::vector<Complex> multiplier_;
};

/// Spectral Laplacian (multiplier -|ξ|²).
ComplexField laplacian(const ComplexField& u);
/// Spectral partial derivative along `axis`; the Nyquist mode is dropped.
ComplexField partial_derivative(const ComplexField& u, int axis);
/// ∫|∇u|² computed by Parseval.
double gradient_energy(const ComplexField& u);
/// ∫ conj(a) b over the box (Riemann sum).
Complex inner_product(const ComplexField& a, const ComplexField& b);

/// Riemann-sum L^q norm; q = +inf gives the grid maximum of |u|.
double lq_norm(const ComplexField& u, double q);
double lq_norm(const ComplexField& u, const ExtExponent& q);

/// Samples the band-limited interpolant of `f` at the points ε·x of `target`.
/// Points outside the source box evaluate to 0 (no periodic wrap).
ComplexField resample_scaled(const ComplexField& f, const Grid& target, double eps);

/// x ↦ f(εx) on f's own grid. Throws Error(SupportEscape) when the result
/// violates `guard`.
ComplexField rescale_field(const ComplexField& f, double eps, const BoxGuard& guard = {});

struct DecayFit {
  std::vector<double> times;
  std::vector<double> sup_norms;
  double slope = 0.0;
  /// -σ with σ = n/2 - n/q at q = ∞.
  double predicted = 0.0;
};

/// Least-squares slope of log ‖e^{itΔ}u₀‖_∞ against log t. Every sampled
/// state is checked against `guard` (Error(SupportEscape)).
DecayFit dispersive_decay_fit(const ComplexField& u0, std::span<const double> times,
                              const BoxGuard& guard = {});

/// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace strz
