#pragma once

// Solvers for i∂ₜu - Δu + V(t,x)u = F on the periodic box: Strang split-step,
// Picard iteration of the Duhamel map, its frozen-potential variant, and the
// partition-and-chain global solve.

#include "strz/exponents.hpp"
#include "strz/grid.hpp"
#include "strz/potentials.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace strz {

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexField> states;
  std::vector<double> energy_log;  // ‖u(t)‖₂ per sample

  std::size_t size() const noexcept { return times.size(); }
  void push(double t, ComplexField u);
};

/// Source term F(t, ·) on a given grid.
using Source = std::function<ComplexField(double t, const Grid& grid)>;

struct StrichartzRatio {
  ExtExponent p;
  ExtExponent q;
  double ratio;  // ‖u‖_{L^p L^q(I)} / ‖u₀‖₂
};

struct PieceReport {
  Piece piece;
  int iterations = 0;
  std::vector<double> contraction_factors;
  double residual = 0.0;
};

struct SolveReport {
  Trajectory trajectory;
  double energy_drift = 0.0;
  std::vector<PieceReport> pieces;
  std::vector<StrichartzRatio> strichartz_ratios;
  double tau = 0.0;
  double c_hat = 0.0;
  /// k (1 + 2Ĉ)^k with k the number of pieces.
  double bound = 0.0;

  std::vector<std::vector<double>> contraction_factors() const;
  std::vector<int> iterations() const;
};

/// Spatial exponent of the Z-norm's second slot: 2n/(n-2) for n >= 3, the
/// configurable fallback otherwise.
double z_exponent(int n, double fallback = 8.0);

/// max(L^∞_t L², L²_t L^Q) of a sampled trajectory (trapezoid in time).
double z_norm(const std::vector<double>& times, const std::vector<ComplexField>& states, double fallback = 8.0);
double z_norm(const Trajectory& traj, double fallback = 8.0);

struct EvolveOptions {
  /// Keep every m-th step in the trajectory (the final state is always kept).
  int sample_every = 1;
  /// Admissible pairs whose Strichartz ratios are accumulated at every step.
  std::vector<std::pair<ExtExponent, ExtExponent>> pairs;
};

/// Strang splitting with V evaluated at step midpoints and a midpoint source
/// correction. Errors from evaluating V (e.g. Singularity) propagate.
SolveReport split_step_evolve(const ComplexField& u0, const PotentialSpec& V, const Source& F, TimeInterval interval,
                              double dt, const EvolveOptions& options = {});

struct IterationOptions {
  double tol = 1e-10;
  int max_iterations = 60;
  double z_fallback = 8.0;
};

struct DuhamelResult {
  Trajectory trajectory;  // every step of the piece
  int iterations = 0;
  std::vector<double> contraction_factors;
  /// ‖Φ(v) - v‖_Z / ‖v‖_Z at the accepted iterate.
  double residual = 0.0;
};

/// Picard iteration v ← Φ(v) from v⁰ = e^{itΔ}u₀ with the trapezoid discrete
/// Duhamel integral on `steps` uniform steps over `piece`. Throws
/// Error(NonContraction) when max_iterations is exhausted.
DuhamelResult duhamel_iterate(const ComplexField& u0, const Source& F, const PotentialSpec& V, TimeInterval piece,
                              int steps, const IterationOptions& options = {});

/// As duhamel_iterate, with inner propagator e^{itH}, H = Δ - V(t₀), realized
/// by Strang steps, and perturbation V - V(t₀).
DuhamelResult frozen_duhamel(const ComplexField& u0, const Source& F, const PotentialSpec& V, TimeInterval piece,
                             int steps, const IterationOptions& options = {});

struct GlobalOptions {
  IterationOptions iteration;
  int sample_every = 1;
  std::vector<std::pair<ExtExponent, ExtExponent>> pairs;
};

/// Partitions `interval` with threshold tau, then runs duhamel_iterate piece
/// by piece, chaining terminal states.
SolveReport solve_global(const ComplexField& u0, const Source& F, const PotentialSpec& V, TimeInterval interval,
                         const ExtExponent& r, const ExtExponent& s, double tau, double dt,
                         const GlobalOptions& options = {});

/// Ĉ = max(1, 1/(2 tau)).
double constant_estimate(double tau);

struct CalibrationOptions {
  TimeInterval interval{0.0, 1.0};
  double tau_min = 1e-6;
  double tau_cap = 1e3;
  int bisection_steps = 30;
  double target_factor = 0.5;
  IterationOptions iteration;
};

/// Largest tau (log-bisection between tau_min and tau_cap) for which the
/// heaviest partition piece of every reference potential contracts with all
/// logged factors <= target_factor. Returns tau_cap when every reference
/// vanishes; throws Error(CalibrationFailure) if tau_min already fails.
double calibrate_tau(const std::vector<PotentialSpec>& references, const ComplexField& probe, const ExtExponent& r,
                     const ExtExponent& s, double dt, const CalibrationOptions& options = {});

}  // namespace strz
