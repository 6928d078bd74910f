#pragma once

// Time-dependent real potentials V(t, x), their mixed L^r_t L^s_x norms and
// the greedy interval partitioner.

#include "strz/exponents.hpp"
#include "strz/grid.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace strz {

/// Which one-sided limit to take at a discontinuity of V in time.
enum class Side { Right, Left };

struct Window {
  double start;
  double length;
  double eps;
  double end() const noexcept { return start + length; }
};

/// Rescaling cascade. Windows k = 1..K:
///   GlobalSubcritical:   start_1 = 0, length k^α,            ε_k = k^{-β/2}
///   GlobalSupercritical: start k,     length k^{-α},         ε_k = k^{β/2}
///   Local:               contiguous from 0, length c·k^{-α}, ε_k = k^{β/2}
struct Schedule {
  ScheduleParams params;
  double length_scale = 1.0;  // c above; 1 except for Local with a prescribed total
  std::vector<Window> windows;

  ScheduleKind kind() const noexcept { return params.kind; }
  double end() const noexcept { return windows.empty() ? 0.0 : windows.back().end(); }
  /// Index of the window containing t (half-open [start, end) for Side::Right,
  /// (start, end] for Side::Left).
  std::optional<std::size_t> window_at(double t, Side side = Side::Right) const;
};

/// Builds K windows from `params`. For Local, `local_total` rescales the
/// lengths so that the infinite cascade has total time T.
Schedule make_schedule(const ScheduleParams& params, int windows,
                       std::optional<double> local_total = std::nullopt);

/// Σ_{k≥1} k^{-a} for a > 1 (partial sum plus Euler-Maclaurin tail).
double zeta(double a);

class PotentialSpec;

struct ZeroPotential {};
struct StaticPotential {
  ComplexField profile;
};
struct PatchedRescaled {
  ComplexField profile;
  Schedule schedule;
};
struct Pseudoconformal {
  ComplexField profile;
};
enum class Interpolation { Step, Linear };
/// a(t) W(x) with a tabulated on knots; a is held constant outside the knots.
struct Modulated {
  ComplexField profile;
  std::vector<double> knots;
  std::vector<double> amplitudes;
  Interpolation interpolation = Interpolation::Linear;
  double amplitude(double t, Side side = Side::Right) const;
};
struct SumTerm {
  std::shared_ptr<const PotentialSpec> spec;
  ExtExponent r;
  ExtExponent s;
};
struct SumPotential {
  std::vector<SumTerm> terms;
};

/// Immutable tagged description of V(t, x). Profiles must be real-valued.
class PotentialSpec {
 public:
  using Variant =
      std::variant<ZeroPotential, StaticPotential, PatchedRescaled, Pseudoconformal, Modulated, SumPotential>;

  PotentialSpec() : v_(ZeroPotential{}) {}
  static PotentialSpec zero() { return PotentialSpec(); }
  static PotentialSpec static_profile(ComplexField profile);
  static PotentialSpec patched(ComplexField profile, Schedule schedule);
  static PotentialSpec pseudoconformal(ComplexField profile);
  static PotentialSpec modulated(ComplexField profile, std::vector<double> knots, std::vector<double> amplitudes,
                                 Interpolation interpolation);
  static PotentialSpec sum(std::vector<std::pair<PotentialSpec, std::pair<ExtExponent, ExtExponent>>> terms);

  const Variant& variant() const noexcept { return v_; }
  const char* kind_name() const noexcept;
  bool is_zero() const noexcept { return std::holds_alternative<ZeroPotential>(v_); }
  /// Sorted discontinuity times of t ↦ V(t, ·) strictly inside (a, b).
  std::vector<double> breakpoints(double a, double b) const;

 private:
  explicit PotentialSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Evaluates one PotentialSpec repeatedly on a fixed target grid, caching
/// resampled profiles per window.
class PotentialEvaluator {
 public:
  PotentialEvaluator(const PotentialSpec& spec, const Grid& grid);

  /// Real-valued field V(t, ·) on the target grid. Throws Error(Singularity)
  /// for a pseudoconformal potential at t <= 0.
  ComplexField at(double t, Side side = Side::Right);
  /// Spatial L^s norm of V(t, ·). Rescaled profiles (cascade windows,
  /// pseudoconformal slices) are measured on their self-similarly scaled
  /// reference grid, so no resolution is lost at extreme scales.
  double slice_norm(double t, double s, Side side = Side::Right);
  /// True when V(t, ·) vanishes identically (exact, no evaluation).
  bool vanishes_at(double t, Side side = Side::Right) const;

  const Grid& grid() const noexcept { return grid_; }

 private:
  const ComplexField& profile_on_grid(const ComplexField& profile);
  const ComplexField& window_field(const PatchedRescaled& p, std::size_t k);

  PotentialSpec spec_;
  Grid grid_;
  std::vector<std::unique_ptr<PotentialEvaluator>> terms_;
  std::optional<ComplexField> profile_cache_;
  std::map<std::size_t, ComplexField> window_cache_;
  std::map<std::pair<double, std::size_t>, double> norm_cache_;
};

/// V(t, ·) on `grid`.
ComplexField evaluate(const PotentialSpec& spec, double t, const Grid& grid, Side side = Side::Right);

struct TimeInterval {
  double start;
  double end;
  double length() const noexcept { return end - start; }
};

/// ‖V‖_{L^r(I; L^s)}: composite trapezoid of ‖V(t)‖_s^r on uniform nodes
/// (step <= dt) of every segment between discontinuities, then the 1/r
/// power; r = ∞ takes the maximum over nodes.
double mixed_norm(const PotentialSpec& spec, const ExtExponent& r, const ExtExponent& s, TimeInterval interval,
                  double dt, const Grid& grid);

struct PatchedNormReport {
  /// Exact ‖V‖_{L^r L^s} of the K-window truncation.
  double exact_norm = 0.0;
  /// Partial sums of Σ len_k^{1/r} ε_k^{2-n/s} ‖W‖_s, the majorant series.
  std::vector<double> partial_sums;
  /// Integral-test bound on the majorant tail k > K (+inf when divergent).
  double tail_bound = 0.0;
  /// Power of k in the majorant summand.
  double summand_exponent = 0.0;
  bool convergent = false;
  double upper_bound() const noexcept;
};

PatchedNormReport analytic_patched_norm(const Schedule& schedule, const ExtExponent& r, const ExtExponent& s, int n,
                                        double w_snorm);

/// ∫_a^b T^e dT, with the logarithmic branch at e = -1.
double power_integral(double e, double a, double b);

/// (∫_δ^1 T^{r(n/s-2)} dT)^{1/r} ‖W‖_s. Requires pseudoconformal_ok(r, s, n)
/// and δ in [0, 1].
double analytic_pseudoconformal_norm(const ExtExponent& r, const ExtExponent& s, int n, double delta,
                                     double w_snorm);

struct Piece {
  double start;
  double end;
  /// Mixed norm of V on the piece (for a Sum, the largest per-term norm).
  double norm;
  std::size_t first_slice;
  std::size_t slice_count;
};

struct Partition {
  std::vector<Piece> pieces;
  double slice_width = 0.0;
  std::size_t count() const noexcept { return pieces.size(); }
};

/// Greedy left-to-right partition of `interval` into pieces whose mixed norm
/// stays <= tau. Slices have width <= dt. A Sum is partitioned so that every
/// term satisfies the bound in its own (r_j, s_j) norm.
/// Errors: tau <= 0 → Precondition; one slice above tau → UnsplittableSlice;
/// r = ∞ with a slice above tau → CannotPartition.
Partition partition_interval(const PotentialSpec& spec, const ExtExponent& r, const ExtExponent& s,
                             TimeInterval interval, double tau, double dt, const Grid& grid);

/// ε²V(ε²t, εx): profiles keep their samples on a grid scaled by 1/ε, window
/// times shrink by ε². Not defined for the pseudoconformal variant.
PotentialSpec rescale_potential(const PotentialSpec& spec, double eps);

/// CSV rows "k,start,length,eps,piece_norm" with piece_norm = len^{1/r} ε^{2-n/s} ‖W‖_s.
void write_window_norms_csv(std::ostream& out, const Schedule& schedule, const ExtExponent& r,
                            const ExtExponent& s, int n, double w_snorm);

}  // namespace strz
