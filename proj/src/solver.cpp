#include "strz/solver.hpp"

#include "strz/error.hpp"
#include "strz/parallel.hpp"
#include "strz/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace strz {

void Trajectory::push(double t, ComplexField u) {
  if (!times.empty() && !(t > times.back())) fail(ErrorKind::Precondition, "trajectory times must increase");
  if (!states.empty() && !(u.grid() == states.front().grid()))
    fail(ErrorKind::Precondition, "trajectory states must share one grid");
  energy_log.push_back(lq_norm(u, 2.0));
  times.push_back(t);
  states.push_back(std::move(u));
}

std::vector<std::vector<double>> SolveReport::contraction_factors() const {
  std::vector<std::vector<double>> out;
  for (const auto& p : pieces) out.push_back(p.contraction_factors);
  return out;
}

std::vector<int> SolveReport::iterations() const {
  std::vector<int> out;
  for (const auto& p : pieces) out.push_back(p.iterations);
  return out;
}

double z_exponent(int n, double fallback) { return n >= 3 ? 2.0 * n / (n - 2) : fallback; }

namespace {

constexpr double kNoiseFloor = 1e-13;

// Trapezoid weights of uniform or non-uniform sample times.
std::vector<double> trapezoid_weights(const std::vector<double>& t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    const double h = t[j + 1] - t[j];
    w[j] += 0.5 * h;
    w[j + 1] += 0.5 * h;
  }
  return w;
}

template <class NormAt>
double z_norm_impl(const std::vector<double>& times, std::size_t count, int n, double fallback, NormAt&& norms) {
  const double q = z_exponent(n, fallback);
  const auto w = trapezoid_weights(times);
  double sup = 0.0, l2 = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    auto [two, qq] = norms(j, q);
    sup = std::max(sup, two);
    l2 += w[j] * qq * qq;
  }
  return std::max(sup, std::sqrt(l2));
}

double z_distance(const std::vector<double>& times, const std::vector<ComplexField>& a,
                  const std::vector<ComplexField>& b, double fallback) {
  return z_norm_impl(times, a.size(), a.front().grid().dim(), fallback, [&](std::size_t j, double q) {
    ComplexField d = a[j];
    d -= b[j];
    return std::pair{lq_norm(d, 2.0), lq_norm(d, q)};
  });
}

bool same_values(const ComplexField& a, const ComplexField& b) {
  return a.grid() == b.grid() && std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

// e^{iθV} pointwise, recomputed only when V or θ changes.
class PhaseCache {
 public:
  const std::vector<Complex>& get(const ComplexField& v, double theta) {
    if (!(valid_ && theta == theta_ && same_values(v, *last_))) {
      phase_.resize(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) phase_[i] = std::polar(1.0, theta * v[i].real());
      last_ = v;
      theta_ = theta;
      valid_ = true;
    }
    return phase_;
  }

 private:
  bool valid_ = false;
  double theta_ = 0.0;
  std::optional<ComplexField> last_;
  std::vector<Complex> phase_;
};

void multiply(ComplexField& u, const std::vector<Complex>& phase) {
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= phase[i];
}

class StrangStepper {
 public:
  StrangStepper(const Grid& grid, double h) : h_(h), full_(grid, h), half_(grid, h / 2) {}

  // Advances u from t to t + h with the potential value `v` (null when zero)
  // and source value `f` (null when absent), both sampled at the midpoint.
  void step(ComplexField& u, const ComplexField* v, const ComplexField* f) {
    if (v) {
      const auto& ph = half_phase_.get(*v, h_ / 2);
      multiply(u, ph);
      full_.apply(u);
      multiply(u, ph);
    } else {
      full_.apply(u);
    }
    if (f) {
      ComplexField g = *f;
      if (v) {
        const auto& q = quarter_phase_.get(*v, h_ / 4);
        multiply(g, q);
        half_.apply(g);
        multiply(g, q);
      } else {
        half_.apply(g);
      }
      g *= Complex(0.0, -h_);
      u += g;
    }
  }

 private:
  double h_;
  FreePropagator full_;
  FreePropagator half_;
  PhaseCache half_phase_;
  PhaseCache quarter_phase_;
};

class RatioAccumulator {
 public:
  RatioAccumulator(const std::vector<std::pair<ExtExponent, ExtExponent>>& pairs, double norm0)
      : pairs_(pairs), acc_(pairs.size(), 0.0), norm0_(norm0) {}

  void add(const ComplexField& u, double weight) {
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const double v = lq_norm(u, pairs_[i].second);
      if (pairs_[i].first.is_infinite()) {
        acc_[i] = std::max(acc_[i], v);
      } else {
        acc_[i] += weight * std::pow(v, pairs_[i].first.to_double());
      }
    }
  }

  std::vector<StrichartzRatio> finish() const {
    std::vector<StrichartzRatio> out;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const auto& [p, q] = pairs_[i];
      const double norm = p.is_infinite() ? acc_[i] : std::pow(acc_[i], 1.0 / p.to_double());
      out.push_back({p, q, norm0_ > 0 ? norm / norm0_ : 0.0});
    }
    return out;
  }

 private:
  std::vector<std::pair<ExtExponent, ExtExponent>> pairs_;
  std::vector<double> acc_;
  double norm0_;
};

void check_pairs(const std::vector<std::pair<ExtExponent, ExtExponent>>& pairs, int n) {
  for (const auto& [p, q] : pairs)
    if (n >= 2 && !is_admissible(p, q, n))
      fail(ErrorKind::Precondition, "(" + p.str() + ", " + q.str() + ") is not admissible in dimension " +
                                        std::to_string(n));
}

int step_count(double length, double dt) {
  if (!(dt > 0)) fail(ErrorKind::Precondition, "time step must be positive");
  if (!(length >= 0)) fail(ErrorKind::Precondition, "time interval must be ordered");
  return std::max(1, static_cast<int>(std::ceil(length / dt - 1e-9)));
}

// Shared engine of the Duhamel iterations: `propagate` applies the inner
// one-step propagator S(h) in place, `perturbation(t, side)` returns the
// potential term P multiplying v inside the integral (empty when zero).
using Perturbation = std::function<std::optional<ComplexField>(double, Side)>;

DuhamelResult duhamel_engine(const ComplexField& u0, const Source& F, TimeInterval piece, int steps,
                             const std::function<void(ComplexField&)>& propagate, const Perturbation& perturbation,
                             const IterationOptions& options) {
  if (steps < 1) fail(ErrorKind::Precondition, "a piece needs at least one step");
  if (!(options.tol > 0)) fail(ErrorKind::Precondition, "iteration tolerance must be positive");
  if (!(piece.end > piece.start)) fail(ErrorKind::Precondition, "piece must have positive length");
  const Grid& grid = u0.grid();
  const double h = piece.length() / steps;
  std::vector<double> times(steps + 1);
  for (int j = 0; j <= steps; ++j) times[j] = j == steps ? piece.end : piece.start + j * h;

  std::vector<ComplexField> base;
  base.reserve(steps + 1);
  base.push_back(u0);
  for (int j = 0; j < steps; ++j) {
    ComplexField next = base.back();
    propagate(next);
    base.push_back(std::move(next));
  }

  std::vector<std::shared_ptr<const ComplexField>> P(steps + 1);
  std::vector<std::shared_ptr<const ComplexField>> Fj(steps + 1);
  for (int j = 0; j <= steps; ++j) {
    const Side side = j == steps ? Side::Left : Side::Right;
    if (auto p = perturbation(times[j], side)) {
      if (j > 0 && P[j - 1] && same_values(*P[j - 1], *p))
        P[j] = P[j - 1];
      else
        P[j] = std::make_shared<const ComplexField>(std::move(*p));
    }
    if (F) Fj[j] = std::make_shared<const ComplexField>(F(times[j], grid));
  }

  auto g_at = [&](int j, const ComplexField& v) -> std::optional<ComplexField> {
    if (!P[j] && !Fj[j]) return std::nullopt;
    ComplexField g = Fj[j] ? *Fj[j] : ComplexField(grid);
    if (P[j])
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= (*P[j])[i] * v[i];
    return g;
  };

  auto phi = [&](const std::vector<ComplexField>& v) {
    std::vector<ComplexField> out;
    out.reserve(steps + 1);
    out.push_back(base[0]);
    ComplexField D(grid);
    auto g = g_at(0, v[0]);
    for (int j = 0; j < steps; ++j) {
      if (g) {
        *g *= 0.5 * h;
        D += *g;
      }
      propagate(D);
      g = g_at(j + 1, v[j + 1]);
      if (g) {
        ComplexField half = *g;
        half *= 0.5 * h;
        D += half;
      }
      ComplexField next = D;
      next *= Complex(0.0, -1.0);
      next += base[j + 1];
      out.push_back(std::move(next));
    }
    return out;
  };

  DuhamelResult res;
  auto finish = [&](std::vector<ComplexField> states, int iterations, double increment) {
    const double norm = z_norm(times, states, options.z_fallback);
    res.iterations = iterations;
    res.residual = norm > 0 ? increment / norm : increment;
    for (int j = 0; j <= steps; ++j) res.trajectory.push(times[j], std::move(states[j]));
    return res;
  };

  std::vector<ComplexField> v = base;
  std::vector<ComplexField> w = phi(v);
  const double d1 = z_distance(times, w, v, options.z_fallback);
  if (!std::isfinite(d1)) fail(ErrorKind::NonContraction, "Duhamel iteration produced non-finite values");
  if (d1 <= kNoiseFloor * z_norm(times, w, options.z_fallback)) return finish(std::move(w), 1, d1);

  double prev = d1;
  for (int m = 1;; ++m) {
    v = std::move(w);
    w = phi(v);
    const double d = z_distance(times, w, v, options.z_fallback);
    if (!std::isfinite(d)) fail(ErrorKind::NonContraction, "Duhamel iteration produced non-finite values");
    if (d > kNoiseFloor * z_norm(times, w, options.z_fallback)) res.contraction_factors.push_back(d / prev);
    if (d <= options.tol * d1) return finish(std::move(w), m, d);
    if (m >= options.max_iterations)
      fail(ErrorKind::NonContraction, "Duhamel iteration did not converge in " + std::to_string(m) +
                                          " iterations on [" + std::to_string(piece.start) + ", " +
                                          std::to_string(piece.end) + "]; the piece is too large");
    prev = d;
  }
}

}  // namespace

double z_norm(const std::vector<double>& times, const std::vector<ComplexField>& states, double fallback) {
  if (states.empty()) return 0.0;
  if (times.size() != states.size()) fail(ErrorKind::Precondition, "times and states differ in length");
  return z_norm_impl(times, states.size(), states.front().grid().dim(), fallback, [&](std::size_t j, double q) {
    return std::pair{lq_norm(states[j], 2.0), lq_norm(states[j], q)};
  });
}

double z_norm(const Trajectory& traj, double fallback) { return z_norm(traj.times, traj.states, fallback); }

SolveReport split_step_evolve(const ComplexField& u0, const PotentialSpec& V, const Source& F, TimeInterval interval,
                              double dt, const EvolveOptions& options) {
  if (options.sample_every < 1) fail(ErrorKind::Precondition, "sample_every must be >= 1");
  u0.check_finite();
  const Grid& grid = u0.grid();
  check_pairs(options.pairs, grid.dim());
  const int steps = step_count(interval.length(), dt);
  const double h = interval.length() / steps;

  PotentialEvaluator ev(V, grid);
  StrangStepper stepper(grid, h);
  const double norm0 = lq_norm(u0, 2.0);
  RatioAccumulator ratios(options.pairs, norm0);

  SolveReport rep;
  ComplexField u = u0;
  rep.trajectory.push(interval.start, u);
  ratios.add(u, 0.5 * h);
  for (int j = 0; j < steps; ++j) {
    const double t = interval.start + j * h;
    const double mid = t + 0.5 * h;
    std::optional<ComplexField> v;
    if (!ev.vanishes_at(mid)) v = ev.at(mid);
    std::optional<ComplexField> f;
    if (F) f = F(mid, grid);
    stepper.step(u, v ? &*v : nullptr, f ? &*f : nullptr);
    u.check_finite();

    const double norm = lq_norm(u, 2.0);
    if (norm0 > 0) rep.energy_drift = std::max(rep.energy_drift, std::abs(norm - norm0) / norm0);
    ratios.add(u, j + 1 == steps ? 0.5 * h : h);
    if ((j + 1) % options.sample_every == 0 || j + 1 == steps)
      rep.trajectory.push(j + 1 == steps ? interval.end : interval.start + (j + 1) * h, u);
  }
  rep.strichartz_ratios = ratios.finish();
  return rep;
}

DuhamelResult duhamel_iterate(const ComplexField& u0, const Source& F, const PotentialSpec& V, TimeInterval piece,
                              int steps, const IterationOptions& options) {
  u0.check_finite();
  const Grid& grid = u0.grid();
  FreePropagator free(grid, piece.length() / std::max(steps, 1));
  PotentialEvaluator ev(V, grid);
  return duhamel_engine(
      u0, F, piece, steps, [&](ComplexField& u) { free.apply(u); },
      [&](double t, Side side) -> std::optional<ComplexField> {
        if (ev.vanishes_at(t, side)) return std::nullopt;
        return ev.at(t, side);
      },
      options);
}

DuhamelResult frozen_duhamel(const ComplexField& u0, const Source& F, const PotentialSpec& V, TimeInterval piece,
                             int steps, const IterationOptions& options) {
  u0.check_finite();
  const Grid& grid = u0.grid();
  PotentialEvaluator ev(V, grid);
  const bool frozen_zero = ev.vanishes_at(piece.start);
  const ComplexField v0 = frozen_zero ? ComplexField(grid) : ev.at(piece.start);
  StrangStepper stepper(grid, piece.length() / std::max(steps, 1));
  return duhamel_engine(
      u0, F, piece, steps, [&](ComplexField& u) { stepper.step(u, frozen_zero ? nullptr : &v0, nullptr); },
      [&](double t, Side side) -> std::optional<ComplexField> {
        ComplexField p = ev.vanishes_at(t, side) ? ComplexField(grid) : ev.at(t, side);
        p -= v0;
        const bool zero = std::all_of(p.values().begin(), p.values().end(), [](Complex c) { return c == 0.0; });
        if (zero) return std::nullopt;
        return p;
      },
      options);
}

double constant_estimate(double tau) {
  if (!(tau > 0)) fail(ErrorKind::Precondition, "tau must be positive");
  return std::max(1.0, 1.0 / (2.0 * tau));
}

SolveReport solve_global(const ComplexField& u0, const Source& F, const PotentialSpec& V, TimeInterval interval,
                         const ExtExponent& r, const ExtExponent& s, double tau, double dt,
                         const GlobalOptions& options) {
  if (options.sample_every < 1) fail(ErrorKind::Precondition, "sample_every must be >= 1");
  u0.check_finite();
  const Grid& grid = u0.grid();
  check_pairs(options.pairs, grid.dim());
  const Partition part = partition_interval(V, r, s, interval, tau, dt, grid);

  SolveReport rep;
  rep.tau = tau;
  rep.c_hat = constant_estimate(tau);
  const double k = static_cast<double>(part.count());
  rep.bound = k * std::pow(1.0 + 2.0 * rep.c_hat, k);

  const double norm0 = lq_norm(u0, 2.0);
  RatioAccumulator ratios(options.pairs, norm0);
  ComplexField u = u0;
  std::size_t global_step = 0;
  rep.trajectory.push(interval.start, u);
  for (const auto& piece : part.pieces) {
    DuhamelResult res =
        duhamel_iterate(u, F, V, {piece.start, piece.end}, static_cast<int>(piece.slice_count), options.iteration);
    const auto& tr = res.trajectory;
    const auto w = trapezoid_weights(tr.times);
    for (std::size_t j = 0; j < tr.size(); ++j) {
      ratios.add(tr.states[j], w[j]);
      if (norm0 > 0) rep.energy_drift = std::max(rep.energy_drift, std::abs(tr.energy_log[j] - norm0) / norm0);
      if (j == 0) continue;
      ++global_step;
      const bool last = &piece == &part.pieces.back() && j + 1 == tr.size();
      if (global_step % options.sample_every == 0 || last) rep.trajectory.push(tr.times[j], tr.states[j]);
    }
    u = tr.states.back();
    rep.pieces.push_back({piece, res.iterations, std::move(res.contraction_factors), res.residual});
  }
  rep.strichartz_ratios = ratios.finish();
  return rep;
}

double calibrate_tau(const std::vector<PotentialSpec>& references, const ComplexField& probe, const ExtExponent& r,
                     const ExtExponent& s, double dt, const CalibrationOptions& options) {
  if (references.empty()) fail(ErrorKind::Precondition, "calibration needs at least one reference potential");
  if (!(options.tau_min > 0 && options.tau_cap > options.tau_min))
    fail(ErrorKind::Precondition, "calibration needs 0 < tau_min < tau_cap");
  if (std::all_of(references.begin(), references.end(), [](const PotentialSpec& v) { return v.is_zero(); }))
    return options.tau_cap;

  const Grid& grid = probe.grid();
  auto passes = [&](double tau) {
    std::vector<char> ok(references.size(), 0);
    parallel_for(references.size(), [&](std::size_t i) {
      const Partition part = partition_interval(references[i], r, s, options.interval, tau, dt, grid);
      const auto heaviest = std::max_element(part.pieces.begin(), part.pieces.end(),
                                             [](const Piece& a, const Piece& b) { return a.norm < b.norm; });
      try {
        const auto res = duhamel_iterate(probe, nullptr, references[i], {heaviest->start, heaviest->end},
                                         static_cast<int>(heaviest->slice_count), options.iteration);
        ok[i] = std::all_of(res.contraction_factors.begin(), res.contraction_factors.end(),
                            [&](double f) { return f <= options.target_factor; });
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonContraction) throw;
      }
    });
    return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  };

  if (passes(options.tau_cap)) return options.tau_cap;

  // No partition exists below the heaviest single slice.
  double floor = options.tau_min;
  const auto slices = static_cast<std::size_t>(std::ceil(options.interval.length() / dt - 1e-9));
  for (const auto& v : references)
    for (std::size_t j = 0; j < slices; ++j) {
      const double a = options.interval.start + j * dt;
      const double b = std::min(options.interval.end, a + dt);
      floor = std::max(floor, mixed_norm(v, r, s, {a, b}, dt, grid) * (1 + 1e-9));
    }
  if (floor >= options.tau_cap)
    fail(ErrorKind::CalibrationFailure, "a single slice exceeds tau_cap; refine dt");
  if (!passes(floor))
    fail(ErrorKind::CalibrationFailure, "no reference contracts even at tau = " + std::to_string(floor));
  double lo = floor, hi = options.tau_cap;
  for (int i = 0; i < options.bisection_steps; ++i) {
    const double mid = std::sqrt(lo * hi);
    bool ok = false;
    try {
      ok = passes(mid);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnsplittableSlice) throw;
    }
    (ok ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace strz
