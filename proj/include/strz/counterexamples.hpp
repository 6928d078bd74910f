#pragma once

// Families of potentials with finite mixed norm whose standing-wave solutions
// have unbounded Strichartz ratios: rescaling cascades and the
// pseudoconformal family.

#include "strz/exponents.hpp"
#include "strz/grid.hpp"
#include "strz/potentials.hpp"

#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace strz {

enum class FamilyKind { GlobalSubcritical, GlobalSupercritical, Local, Pseudoconformal };
const char* to_string(FamilyKind kind);
std::optional<FamilyKind> parse_family_kind(std::string_view text);

/// Headroom passed to the parameter selectors when building families. Large
/// enough that the ratio growth is visible within a couple of hundred windows.
Rational family_headroom();

struct CounterexampleFamily {
  FamilyKind kind;
  PotentialSpec potential;
  ComplexField W;
  ComplexField u0;
  std::optional<Schedule> schedule;  // absent for Pseudoconformal
  ExtExponent r;
  ExtExponent s;
  int n;
  double delta = 0.0;  // Pseudoconformal only
  /// ‖V‖_{L^r L^s}: exact truncated norm for cascades, closed form for the
  /// pseudoconformal family.
  double analytic_potential_norm = 0.0;
  /// Certified bound on the norm of the infinite cascade (majorant partial
  /// sum plus integral-test tail); equals the closed form for Pseudoconformal.
  double certified_bound = 0.0;
  std::optional<PatchedNormReport> patched_report;
  /// End of the last window; for Local also the limit of the full cascade.
  double total_time = 0.0;
  double infinite_total_time = 0.0;
};

/// Cascade family on K windows. The regime of (r, s, n) must match `kind`
/// (Error(WrongRegime)); a divergent majorant raises Error(DivergentNorm).
/// For Local, `total_time` rescales the window lengths so the infinite
/// cascade ends at T.
CounterexampleFamily build_family(FamilyKind kind, const ExtExponent& r, const ExtExponent& s, int n,
                                  const ComplexField& W, const ComplexField& u0, int K,
                                  std::optional<double> total_time = std::nullopt,
                                  const Rational& headroom = family_headroom());

struct RatioSeries {
  ExtExponent p;
  ExtExponent q;
  std::vector<int> k;
  std::vector<double> start;
  std::vector<double> length;
  std::vector<double> eps;
  std::vector<double> ratio;
  std::optional<double> fitted_slope;
  double predicted_slope = 0.0;
  int fit_from = 0;
  int fit_to = 0;
  /// (∞, 2): the ratio is 1 by mass conservation and carries no violation.
  bool excluded = false;
};

/// R_k = len_k^{1/p} ‖u₀(ε_k ·)‖_q / ‖u₀(ε_k ·)‖₂ with both norms taken on
/// the ε_k-scaled grid. For the pseudoconformal family the k-th entry is
/// ‖U‖_{L^p(δ_k, 1; L^q)} / ‖U(1)‖₂ with δ_k = 1/(k+1), computed from the
/// same scaled-grid norms. The slope is fitted over k in the fit range
/// (default [ceil(K/5), K]); fewer than two points leave it empty.
RatioSeries ratio_series(const CounterexampleFamily& family, const ExtExponent& p, const ExtExponent& q,
                         std::optional<std::pair<int, int>> fit_range = std::nullopt);

/// CSV rows "k,start,length,eps,R_k".
void write_ratio_csv(std::ostream& out, const RatioSeries& series);

struct WindowNorm {
  ExtExponent p;
  ExtExponent q;
  double numeric;
  double closed_form;
  double relative_error() const noexcept;
};

struct WindowCheck {
  int k = 0;
  double eps = 0;
  double start = 0;
  double length = 0;
  int steps = 0;
  double energy_start = 0;
  double energy_expected = 0;
  double energy_end = 0;
  /// max over samples of ‖u(t) - e^{-iε²(t-T_k)} u(T_k)‖₂ / ‖u(T_k)‖₂
  double phase_error = 0;
  std::vector<WindowNorm> norms;
};

/// Evolves the rescaled standing wave through each listed window of a
/// cascade family on the ε_k-scaled grid with time step dt/ε_k² (dt is the
/// step in the window's natural time). Throws Error(SupportEscape) if u₀
/// violates the box guard.
std::vector<WindowCheck> window_crosscheck(const CounterexampleFamily& family, const std::vector<int>& windows,
                                           double dt,
                                           const std::vector<std::pair<ExtExponent, ExtExponent>>& pairs,
                                           int samples = 16);

/// Pseudoconformal family on [δ, 1]: V(T,X) = T^{-2} W(X/T) and
/// U(T,X) = e^{-i|X|²/4T} T^{-n/2} e^{i/T} u₀(X/T).
struct PseudoconformalFamily {
  CounterexampleFamily family;

  /// U(T, ·) on `grid` (band-limited resampling of u₀).
  ComplexField sample(double T, const Grid& grid) const;
  /// ∂_T U(T, ·) on `grid`, from the closed form and spectral ∇u₀.
  ComplexField sample_time_derivative(double T, const Grid& grid) const;
  /// Reflected solution conj(U(1 - t)) on `grid`; it solves the same equation
  /// with potential V(1 - t) on [0, 1 - δ].
  ComplexField sample_reflected(double t, const Grid& grid) const;
  /// ‖i∂_T U - Δ U + V U‖₂ / ‖U‖₂ at time T on `grid`.
  double residual(double T, const Grid& grid) const;
  /// Trapezoid in T of ‖U(T)‖_q^p over [δ, 1] (max for p = ∞), spatial norms
  /// taken on the T-scaled grid.
  double solution_norm(const ExtExponent& p, const ExtExponent& q, double delta, double dt) const;
  /// (1/δ - 1)^{1/p} ‖u₀‖_q.
  double solution_norm_closed_form(const ExtExponent& p, const ExtExponent& q, double delta) const;
};

/// Requires pseudoconformal_ok(r, s, n) and δ in (0, 1).
PseudoconformalFamily pseudoconformal_build(const ComplexField& W, const ComplexField& u0, const ExtExponent& r,
                                            const ExtExponent& s, int n, double delta);

/// Time remap t ↦ 1 - t taking [0, 1 - δ] to [δ, 1].
inline double reflected_time(double t) { return 1.0 - t; }

}  // namespace strz
