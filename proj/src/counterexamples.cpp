#include "strz/counterexamples.hpp"

#include "strz/error.hpp"
#include "strz/parallel.hpp"
#include "strz/solver.hpp"
#include "strz/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace strz {

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::GlobalSubcritical: return "global-subcritical";
    case FamilyKind::GlobalSupercritical: return "global-supercritical";
    case FamilyKind::Local: return "local";
    case FamilyKind::Pseudoconformal: return "pseudoconformal";
  }
  return "?";
}

std::optional<FamilyKind> parse_family_kind(std::string_view text) {
  for (auto k : {FamilyKind::GlobalSubcritical, FamilyKind::GlobalSupercritical, FamilyKind::Local,
                 FamilyKind::Pseudoconformal})
    if (text == to_string(k)) return k;
  if (text == "subcritical") return FamilyKind::GlobalSubcritical;
  if (text == "supercritical") return FamilyKind::GlobalSupercritical;
  return std::nullopt;
}

Rational family_headroom() { return Rational(3); }

namespace {

void check_profiles(const ComplexField& W, const ComplexField& u0, int n) {
  if (W.grid().dim() != n || u0.grid().dim() != n)
    fail(ErrorKind::Precondition, "profile dimension differs from n = " + std::to_string(n));
  if (!(W.grid() == u0.grid())) fail(ErrorKind::Precondition, "W and u0 must share one grid");
  if (!W.is_real()) fail(ErrorKind::Precondition, "W must be real-valued");
  if (!(lq_norm(u0, 2.0) > 0)) fail(ErrorKind::Precondition, "u0 must be nonzero");
}

ScheduleKind schedule_kind(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::GlobalSubcritical: return ScheduleKind::GlobalSubcritical;
    case FamilyKind::GlobalSupercritical: return ScheduleKind::GlobalSupercritical;
    case FamilyKind::Local: return ScheduleKind::Local;
    case FamilyKind::Pseudoconformal: break;
  }
  fail(ErrorKind::Precondition, "the pseudoconformal family has no window schedule");
}

// ‖u₀(ε·)‖_q measured on the ε-scaled grid, where the samples are unchanged.
double scaled_norm(const ComplexField& u0, double eps, double q) {
  return lq_norm(u0.on_grid(u0.grid().scaled(1.0 / eps)), q);
}

std::optional<double> fit_slope(const std::vector<int>& k, const std::vector<double>& ratio, int from, int to) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < k.size(); ++i)
    if (k[i] >= from && k[i] <= to && ratio[i] > 0) {
      x.push_back(std::log(static_cast<double>(k[i])));
      y.push_back(std::log(ratio[i]));
    }
  if (x.size() < 2) return std::nullopt;
  return least_squares_slope(x, y);
}

}  // namespace

CounterexampleFamily build_family(FamilyKind kind, const ExtExponent& r, const ExtExponent& s, int n,
                                  const ComplexField& W, const ComplexField& u0, int K,
                                  std::optional<double> total_time, const Rational& headroom) {
  check_profiles(W, u0, n);
  if (K < 1) fail(ErrorKind::Precondition, "a family needs at least one window");
  const ScheduleKind sk = schedule_kind(kind);
  const ScheduleParams params = sk == ScheduleKind::GlobalSubcritical ? global_subcritical_params(r, s, n, headroom)
                                                                      : supercritical_params(r, s, n, sk, headroom);
  if (total_time && sk != ScheduleKind::Local)
    fail(ErrorKind::Precondition, "a total time only applies to the local family");
  Schedule sch = make_schedule(params, K, total_time);

  const double w_snorm = lq_norm(W, s);
  PatchedNormReport rep = analytic_patched_norm(sch, r, s, n, w_snorm);
  if (!rep.convergent)
    fail(ErrorKind::DivergentNorm, "majorant series diverges (summand exponent " +
                                       std::to_string(rep.summand_exponent) + "); parameter selection is inconsistent");

  CounterexampleFamily fam{kind, PotentialSpec::patched(W, sch), W, u0, sch, r, s, n};
  fam.analytic_potential_norm = rep.exact_norm;
  fam.certified_bound = rep.upper_bound();
  fam.patched_report = std::move(rep);
  fam.total_time = sch.end();
  fam.infinite_total_time =
      sk == ScheduleKind::Local ? sch.length_scale * zeta(to_double(params.alpha)) : std::numeric_limits<double>::infinity();
  return fam;
}

RatioSeries ratio_series(const CounterexampleFamily& family, const ExtExponent& p, const ExtExponent& q,
                         std::optional<std::pair<int, int>> fit_range) {
  const int n = family.n;
  const bool energy_pair = p.is_infinite() && q == ExtExponent(2);
  if (!energy_pair && !is_admissible(p, q, n))
    fail(ErrorKind::Precondition, "(" + p.str() + ", " + q.str() + ") is not admissible in dimension " +
                                      std::to_string(n));
  RatioSeries out{p, q};
  out.excluded = energy_pair;
  const double qd = q.to_double();
  const double inv_p = to_double(p.reciprocal());

  if (family.kind == FamilyKind::Pseudoconformal) {
    // δ_k = 1/(k+1): ‖U(T)‖_q = T^{-n/2+n/q}‖u₀‖_q on the T-scaled grid, and
    // T^{p(-n/2+n/q)} = T^{-2} integrates to 1/δ - 1 = k.
    const int K = 200;
    const double mass = scaled_norm(family.u0, 1.0, 2.0);
    const double uq = scaled_norm(family.u0, 1.0, qd);
    for (int k = 1; k <= K; ++k) {
      const double delta = 1.0 / (k + 1);
      out.k.push_back(k);
      out.start.push_back(delta);
      out.length.push_back(1.0 - delta);
      out.eps.push_back(1.0 / delta);
      out.ratio.push_back(energy_pair ? mass / mass : std::pow(static_cast<double>(k), inv_p) * uq / mass);
    }
    out.predicted_slope = inv_p;
  } else {
    const Schedule& sch = *family.schedule;
    for (std::size_t i = 0; i < sch.windows.size(); ++i) {
      const auto& w = sch.windows[i];
      const double mass = scaled_norm(family.u0, w.eps, 2.0);
      const double num = energy_pair ? mass : std::pow(w.length, inv_p) * scaled_norm(family.u0, w.eps, qd);
      out.k.push_back(static_cast<int>(i) + 1);
      out.start.push_back(w.start);
      out.length.push_back(w.length);
      out.eps.push_back(w.eps);
      out.ratio.push_back(num / mass);
    }
    const double ab = to_double(sch.params.alpha - sch.params.beta);
    out.predicted_slope = (family.kind == FamilyKind::GlobalSubcritical ? ab : -ab) * inv_p;
  }

  const int K = static_cast<int>(out.k.size());
  auto [from, to] = fit_range.value_or(std::pair{std::max(1, (K + 4) / 5), K});
  out.fit_from = from;
  out.fit_to = std::min(to, K);
  out.fitted_slope = fit_slope(out.k, out.ratio, out.fit_from, out.fit_to);
  return out;
}

void write_ratio_csv(std::ostream& out, const RatioSeries& series) {
  out << "k,start,length,eps,R_k\n";
  char buf[256];
  for (std::size_t i = 0; i < series.k.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", series.k[i], series.start[i], series.length[i],
                  series.eps[i], series.ratio[i]);
    out << buf;
  }
}

double WindowNorm::relative_error() const noexcept {
  return closed_form != 0 ? std::abs(numeric - closed_form) / std::abs(closed_form) : std::abs(numeric);
}

std::vector<WindowCheck> window_crosscheck(const CounterexampleFamily& family, const std::vector<int>& windows,
                                           double dt,
                                           const std::vector<std::pair<ExtExponent, ExtExponent>>& pairs,
                                           int samples) {
  if (!family.schedule) fail(ErrorKind::Precondition, "window cross-check needs a cascade family");
  if (!(dt > 0)) fail(ErrorKind::Precondition, "time step must be positive");
  const Schedule& sch = *family.schedule;
  for (int k : windows)
    if (k < 1 || k > static_cast<int>(sch.windows.size()))
      fail(ErrorKind::Precondition, "window " + std::to_string(k) + " is outside the schedule");
  BoxGuard{}.check(family.u0, "window cross-check profile");

  const double u0_mass = lq_norm(family.u0, 2.0);
  std::vector<WindowCheck> out(windows.size());
  parallel_for(windows.size(), [&](std::size_t idx) {
    const int k = windows[idx];
    const Window& win = sch.windows[k - 1];
    const Grid grid = family.u0.grid().scaled(1.0 / win.eps);
    const ComplexField start = resample_scaled(family.u0, grid, win.eps);
    const double phys_dt = dt / (win.eps * win.eps);

    EvolveOptions opts;
    opts.pairs = pairs;
    const int steps = std::max(1, static_cast<int>(std::ceil(win.length / phys_dt - 1e-9)));
    opts.sample_every = std::max(1, steps / std::max(samples, 1));
    SolveReport rep = split_step_evolve(start, family.potential, nullptr, {win.start, win.end()}, phys_dt, opts);

    WindowCheck c{k, win.eps, win.start, win.length, steps};
    c.energy_start = lq_norm(start, 2.0);
    c.energy_expected = std::pow(win.eps, -0.5 * family.n) * u0_mass;
    c.energy_end = rep.trajectory.energy_log.back();
    c.phase_error = 0.0;
    for (std::size_t j = 0; j < rep.trajectory.size(); ++j) {
      ComplexField expect = start;
      expect *= std::polar(1.0, -win.eps * win.eps * (rep.trajectory.times[j] - win.start));
      expect -= rep.trajectory.states[j];
      c.phase_error = std::max(c.phase_error, lq_norm(expect, 2.0) / c.energy_start);
    }
    for (const auto& sr : rep.strichartz_ratios) {
      const double numeric = sr.ratio * c.energy_start;
      const double closed = std::pow(win.length, to_double(sr.p.reciprocal())) *
                            std::pow(win.eps, -family.n / sr.q.to_double()) * lq_norm(family.u0, sr.q);
      c.norms.push_back({sr.p, sr.q, numeric, closed});
    }
    out[idx] = std::move(c);
  });
  return out;
}

// --- pseudoconformal ---------------------------------------------------------

PseudoconformalFamily pseudoconformal_build(const ComplexField& W, const ComplexField& u0, const ExtExponent& r,
                                            const ExtExponent& s, int n, double delta) {
  check_profiles(W, u0, n);
  if (!pseudoconformal_ok(r, s, n))
    fail(ErrorKind::Precondition, "(r, s) = (" + r.str() + ", " + s.str() + ") fails the pseudoconformal condition");
  if (!(delta > 0 && delta < 1)) fail(ErrorKind::Precondition, "delta must lie in (0, 1)");
  CounterexampleFamily fam{FamilyKind::Pseudoconformal, PotentialSpec::pseudoconformal(W), W, u0, std::nullopt, r, s,
                           n};
  fam.delta = delta;
  fam.analytic_potential_norm = analytic_pseudoconformal_norm(r, s, n, delta, lq_norm(W, s));
  // the δ → 0 limit bounds every truncation
  fam.certified_bound = analytic_pseudoconformal_norm(r, s, n, 0.0, lq_norm(W, s));
  fam.total_time = 1.0 - delta;
  fam.infinite_total_time = 1.0;
  return {std::move(fam)};
}

namespace {

void check_time(double T) {
  if (!(T > 0)) fail(ErrorKind::Singularity, "pseudoconformal solution is singular at T = " + std::to_string(T));
}

// e^{-i|X|²/4T + i/T} T^{-n/2} at every point of `grid`.
std::vector<Complex> chirp(double T, const Grid& grid) {
  std::vector<Complex> c(grid.size());
  const double amp = std::pow(T, -0.5 * grid.dim());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto x = grid.point(i);
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) r2 += x[a] * x[a];
    c[i] = std::polar(amp, -r2 / (4 * T) + 1.0 / T);
  }
  return c;
}

}  // namespace

ComplexField PseudoconformalFamily::sample(double T, const Grid& grid) const {
  check_time(T);
  ComplexField u = resample_scaled(family.u0, grid, 1.0 / T);
  const auto c = chirp(T, grid);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= c[i];
  return u;
}

ComplexField PseudoconformalFamily::sample_time_derivative(double T, const Grid& grid) const {
  check_time(T);
  const int n = grid.dim();
  const ComplexField base = resample_scaled(family.u0, grid, 1.0 / T);
  std::vector<ComplexField> grad;
  for (int a = 0; a < n; ++a) grad.push_back(resample_scaled(partial_derivative(family.u0, a), grid, 1.0 / T));
  const auto c = chirp(T, grid);
  ComplexField out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = grid.point(i);
    double r2 = 0.0;
    Complex radial = 0.0;
    for (int a = 0; a < n; ++a) {
      r2 += x[a] * x[a];
      radial += x[a] * grad[a][i];
    }
    const Complex log_derivative(-0.5 * n / T, r2 / (4 * T * T) - 1.0 / (T * T));
    out[i] = c[i] * (log_derivative * base[i] - radial / (T * T));
  }
  return out;
}

ComplexField PseudoconformalFamily::sample_reflected(double t, const Grid& grid) const {
  ComplexField u = sample(reflected_time(t), grid);
  for (auto& v : u.values()) v = std::conj(v);
  return u;
}

double PseudoconformalFamily::residual(double T, const Grid& grid) const {
  const ComplexField u = sample(T, grid);
  ComplexField res = sample_time_derivative(T, grid);
  res *= Complex(0.0, 1.0);
  res -= laplacian(u);
  const ComplexField v = evaluate(family.potential, T, grid);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] += v[i] * u[i];
  return lq_norm(res, 2.0) / lq_norm(u, 2.0);
}

double PseudoconformalFamily::solution_norm(const ExtExponent& p, const ExtExponent& q, double delta,
                                            double dt) const {
  if (!(delta > 0 && delta < 1)) fail(ErrorKind::Precondition, "delta must lie in (0, 1)");
  if (!(dt > 0)) fail(ErrorKind::Precondition, "time step must be positive");
  const int n = family.n;
  const double qd = q.to_double();
  auto slice = [&](double T) {
    ComplexField u = family.u0.on_grid(family.u0.grid().scaled(T));
    u *= std::pow(T, -0.5 * n);
    return lq_norm(u, qd);
  };
  const int m = std::max(1, static_cast<int>(std::ceil((1.0 - delta) / dt - 1e-9)));
  const double h = (1.0 - delta) / m;
  double acc = 0.0;
  for (int j = 0; j <= m; ++j) {
    const double T = j == m ? 1.0 : delta + j * h;
    const double v = slice(T);
    if (p.is_infinite()) {
      acc = std::max(acc, v);
    } else {
      acc += (j == 0 || j == m ? 0.5 * h : h) * std::pow(v, p.to_double());
    }
  }
  return p.is_infinite() ? acc : std::pow(acc, 1.0 / p.to_double());
}

double PseudoconformalFamily::solution_norm_closed_form(const ExtExponent& p, const ExtExponent& q,
                                                        double delta) const {
  const double uq = lq_norm(family.u0, q);
  if (p.is_infinite()) {
    // sup over [δ, 1] of T^{-n/2+n/q}
    const double e = -0.5 * family.n + family.n / q.to_double();
    return std::max(1.0, std::pow(delta, e)) * uq;
  }
  const double e = p.to_double() * (-0.5 * family.n + family.n / q.to_double());
  return std::pow(power_integral(e, delta, 1.0), 1.0 / p.to_double()) * uq;
}

}  // namespace strz
