#pragma once

// Ground pair of -Δf + f = μ w f under ∫ w f² = 1 and the standing wave it
// produces.

#include "strz/grid.hpp"

namespace strz {

struct GroundPair {
  double mu = 0.0;
  ComplexField f;
  ComplexField w;
  /// ‖-Δf + f - μ w f‖₂ / ‖f‖₂
  double residual = 0.0;
  int iterations = 0;
  /// Fraction of |f̂|² carried by modes with |ξ| above half the Nyquist
  /// wavenumber; a smoothness diagnostic.
  double spectral_tail = 0.0;
};

struct GroundOptions {
  double tol = 1e-11;
  /// Residual still accepted when the iteration stalls at roundoff level.
  double accept = 1e-9;
  int max_iterations = 100000;
  /// Iterations without residual improvement before declaring stagnation.
  int patience = 2000;
};

/// Power iteration on (-Δ+I)⁻¹(w·), shifted so its top eigenvalue is the
/// largest positive one. f is real, ∫ w f² = 1, and f > 0 at the maximum of
/// w. Errors: w not real → Precondition; max w <= 0 → EmptyConstraint;
/// stagnation → Convergence.
GroundPair ground_pair(const ComplexField& w, const GroundOptions& options = {});

/// amplitude · exp(-|x - center|²/width²), zeroed where below 1e-300.
ComplexField gaussian_weight(const Grid& grid, double amplitude = 1.0, double width = 1.0,
                             std::array<double, 3> center = {0.0, 0.0, 0.0});

/// ‖-Δf + f - μ w f‖₂ / ‖f‖₂.
double euler_lagrange_residual(const ComplexField& f, const ComplexField& w, double mu);

struct StandingWave {
  ComplexField W;   // -μ w
  ComplexField u0;  // f
  /// ‖-Δu₀ + W u₀ + u₀‖₂ / ‖u₀‖₂
  double residual = 0.0;
};

StandingWave standing_wave_potential(const GroundPair& gp);

}  // namespace strz
