#include "strz/acceptance.hpp"

#include "strz/counterexamples.hpp"
#include "strz/error.hpp"
#include "strz/exponents.hpp"
#include "strz/groundstate.hpp"
#include "strz/potentials.hpp"
#include "strz/solver.hpp"
#include "strz/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace strz::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      passed_ = false;
      failures_.push_back("FAILED " + what);
    } else {
      notes_.push_back(what);
    }
  }
  void note(const std::string& what) { notes_.push_back(what); }
  bool passed() const { return passed_; }
  std::vector<std::string> lines() const {
    std::vector<std::string> out = failures_;
    out.insert(out.end(), notes_.begin(), notes_.end());
    return out;
  }

 private:
  bool passed_ = true;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class F>
bool throws_kind(ErrorKind kind, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  } catch (...) {
    return false;
  }
  return false;
}

ExtExponent E(long long a, long long b = 1) { return ExtExponent(a, b); }
const ExtExponent kInfExp = ExtExponent::infinity();

// Rational in [lo, hi] with denominator <= 32.
Rational random_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi) {
  for (;;) {
    const long long den = std::uniform_int_distribution<long long>(1, 32)(rng);
    const Rational a = lo * den, b = hi * den;
    auto ceil_of = [](const Rational& x) {
      boost::multiprecision::cpp_int q = boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
      if (Rational(q) < x) ++q;
      return q;
    };
    auto floor_of = [](const Rational& x) {
      boost::multiprecision::cpp_int q = boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
      if (Rational(q) > x) --q;
      return q;
    };
    const auto nlo = ceil_of(a), nhi = floor_of(b);
    if (nlo > nhi) continue;
    const long long span = static_cast<long long>(nhi - nlo);
    const long long pick = std::uniform_int_distribution<long long>(0, span)(rng);
    return Rational(nlo + pick, den);
  }
}

// --- shared fixtures ----------------------------------------------------------

struct Profiles {
  ComplexField W;
  ComplexField u0;
};

Profiles standing_wave_profiles(const Grid& grid, double width) {
  const GroundPair gp = ground_pair(gaussian_weight(grid, 1.0, width));
  StandingWave sw = standing_wave_potential(gp);
  return {std::move(sw.W), std::move(sw.u0)};
}

const Profiles& profiles_3d() {
  static const Profiles p = standing_wave_profiles(Grid(3, 16.0, 32), 2.0);
  return p;
}

// --- AC1 ----------------------------------------------------------------------

CriterionResult exponent_algebra() {
  Checks c;
  int bad = 0;
  auto ex = [&](bool ok, const std::string& what) {
    if (!ok) {
      ++bad;
      c.expect(false, "example " + what);
    }
  };
  ex(is_admissible(kInfExp, E(2), 3), "(inf,2,3) admissible");
  ex(is_admissible(E(2), E(6), 3), "(2,6,3) admissible");
  ex(!is_admissible(E(2), kInfExp, 2), "(2,inf,2) excluded");
  ex(is_admissible(E(4), E(3), 3), "(4,3,3) admissible");
  ex(!is_admissible(E(1), E(2), 3), "(1,2,3) not admissible");
  ex(throws_kind(ErrorKind::DimensionOutOfRange, [] { is_admissible(E(2), E(2), 1); }), "n = 1 rejected");
  ex(dual(E(2)) == E(2), "dual 2");
  ex(dual(kInfExp) == E(1), "dual inf");
  ex(dual(E(6)) == E(6, 5), "dual 6");
  ex(classify_potential(E(2), E(3), 3).criticality == Criticality::Critical, "classify (2,3,3)");
  ex(classify_potential(E(4), E(6), 3).criticality == Criticality::Subcritical, "classify (4,6,3)");
  for (int n : {2, 3})
    ex(classify_potential(kInfExp, ExtExponent(Rational(n, 2) < 1 ? Rational(1) : Rational(n, 2)), n).criticality ==
           Criticality::Critical,
       "classify (inf,n/2,n)");
  ex(scaling_exponent(E(2), E(3), 3) == 0, "scaling (2,3,3)");
  ex(scaling_exponent(kInfExp, kInfExp, 3) == 2, "scaling (inf,inf,3)");
  ex(scaling_exponent(E(1), E(2), 3) == make_rational(-3, 2), "scaling (1,2,3)");
  {
    auto a = holder_split_case_a(E(2), E(3), 3);
    ex(a.p == kInfExp && a.q == E(2), "holder (2,3,3)");
    auto b = holder_split_case_a(E(4), E(2), 3);
    ex(b.p == E(4) && b.q == E(3), "holder (4,2,3)");
    auto d = holder_split_case_a(E(2), E(4), 4);
    ex(d.p == kInfExp && d.q == E(2), "holder (2,4,4)");
    ex(throws_kind(ErrorKind::Precondition, [] { holder_split_case_a(E(4), E(6), 3); }), "holder non-critical");
  }
  {
    auto a = dual_pair_case_b(E(2), E(3), 3);
    ex(a.admissible.p == E(2) && a.admissible.q == E(6) && a.dual_p == E(2) && a.dual_q == E(6, 5), "dual pair (2,3,3)");
    auto b = dual_pair_case_b(E(1), kInfExp, 3);
    ex(b.admissible.p == kInfExp && b.admissible.q == E(2) && b.dual_p == E(1) && b.dual_q == E(2),
       "dual pair (1,inf,3)");
    auto d = dual_pair_case_b(E(3, 2), E(6), 4);
    ex(d.admissible.p == E(3) && d.admissible.q == E(3) && d.dual_p == E(3, 2) && d.dual_q == E(3, 2),
       "dual pair (3/2,6,4)");
  }
  {
    auto sub = global_subcritical_params(E(4), E(6), 3);
    ex(satisfies_invariant(sub, E(4), E(6), 3) && sub.beta == make_rational(11, 5), "subcritical (4,6,3)");
    ex(satisfies_invariant(global_subcritical_params(E(2), E(4), 2), E(2), E(4), 2), "subcritical (2,4,2)");
    ex(!satisfies_invariant({2, 2, ScheduleKind::GlobalSubcritical}, E(4), E(6), 3), "alpha = beta = 2 rejected");
    ex(throws_kind(ErrorKind::WrongRegime, [] { global_subcritical_params(E(2), E(3), 3); }), "critical rejected");
    ex(satisfies_invariant(local_params(E(1), E(2), 3), E(1), E(2), 3), "local (1,2,3)");
    ex(satisfies_invariant(local_params(E(1), E(1), 2), E(1), E(1), 2), "local (1,1,2)");
    ex(satisfies_invariant({make_rational(7, 5), make_rational(3, 2), ScheduleKind::Local}, E(1), E(2), 3),
       "local example beta = 3/2, alpha = 7/5");
    ex(satisfies_invariant({make_rational(3, 2), make_rational(8, 5), ScheduleKind::Local}, E(1), E(1), 2),
       "local example beta = 1.6, alpha = 1.5");
    ex(!satisfies_invariant({2, 2, ScheduleKind::Local}, E(1), E(2), 3), "alpha = beta rejected");
  }
  ex(pseudoconformal_ok(E(1), E(2), 3), "pseudoconformal (1,2,3)");
  ex(throws_kind(ErrorKind::Precondition, [] { pseudoconformal_ok(E(2), E(3), 3); }), "pseudoconformal s = n");
  ex(!pseudoconformal_ok(E(2), E(3, 2), 2), "pseudoconformal (2,3/2,2)");
  c.note("worked examples failing: " + std::to_string(bad));

  std::mt19937_64 rng(20240601);
  int fails = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const Rational inv_r = random_rational(rng, Rational(1, 32), Rational(1, 2));
    const Rational inv_s = 2 * (1 - inv_r) / n;
    const auto r = ExtExponent::from_reciprocal(inv_r), s = ExtExponent::from_reciprocal(inv_s);
    try {
      if (!is_admissible(holder_split_case_a(r, s, n))) ++fails;
    } catch (const Error&) {
      ++fails;
    }
  }
  c.expect(fails == 0, "holder split closure failures: " + std::to_string(fails) + " of 1000");

  fails = 0;
  int endpoint_rejections = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const Rational inv_r = random_rational(rng, Rational(1, 2), Rational(1));
    const Rational inv_s = 2 * (1 - inv_r) / n;
    const auto r = ExtExponent::from_reciprocal(inv_r), s = ExtExponent::from_reciprocal(inv_s);
    const bool endpoint = n == 2 && inv_r == Rational(1, 2);
    try {
      auto d = dual_pair_case_b(r, s, n);
      const bool ok = !endpoint && is_admissible(d.admissible) && dual(d.admissible.p) == d.dual_p &&
                      dual(d.admissible.q) == d.dual_q && d.dual_p >= E(1) && d.dual_p <= E(2) &&
                      d.dual_q >= E(1) && d.dual_q <= E(2);
      if (!ok) ++fails;
    } catch (const Error& e) {
      if (endpoint && e.kind() == ErrorKind::Precondition)
        ++endpoint_rejections;
      else
        ++fails;
    }
  }
  c.expect(fails == 0, "dual pair failures: " + std::to_string(fails) + " of 1000 (n = 2 endpoint rejected " +
                           std::to_string(endpoint_rejections) + " times)");

  fails = 0;
  for (int i = 0; i < 1000; ++i) {
    const ExtExponent e = rng() % 10 == 0 ? kInfExp : ExtExponent::from_reciprocal(random_rational(rng, 0, 1));
    if (!(dual(dual(e)) == e)) ++fails;
  }
  c.expect(fails == 0, "dual involution failures: " + std::to_string(fails) + " of 1000");

  fails = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const Rational inv_r = random_rational(rng, 0, 1);
    Rational inv_s = random_rational(rng, 0, 1);
    if (i % 3 == 0 && 2 * (1 - inv_r) / n <= 1) inv_s = 2 * (1 - inv_r) / n;
    const auto r = ExtExponent::from_reciprocal(inv_r), s = ExtExponent::from_reciprocal(inv_s);
    const bool critical = classify_potential(r, s, n).criticality == Criticality::Critical;
    if (critical != (scaling_exponent(r, s, n) == 0)) ++fails;
  }
  c.expect(fails == 0, "criticality/scaling disagreements: " + std::to_string(fails) + " of 1000");

  fails = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const auto r = ExtExponent(random_rational(rng, 1, 16));
    Rational sv = random_rational(rng, Rational(n, 2), Rational(n));
    if (sv == Rational(n, 2) || sv == Rational(n)) sv = Rational(3 * n, 4);
    try {
      const auto pc = pseudoconformal_conditions(r, ExtExponent(sv), n);
      if (pc.holder_form != pc.integrability_form) ++fails;
    } catch (const Error&) {
      ++fails;
    }
  }
  c.expect(fails == 0, "pseudoconformal form disagreements: " + std::to_string(fails) + " of 1000");

  fails = 0;
  for (int i = 0; i < 500; ++i) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const Rational inv_r = random_rational(rng, Rational(1, 32), 1);
    const Rational inv_s = random_rational(rng, 0, 1);
    const auto r = ExtExponent::from_reciprocal(inv_r), s = ExtExponent::from_reciprocal(inv_s);
    const auto crit = classify_potential(r, s, n).criticality;
    try {
      if (crit == Criticality::Subcritical) {
        if (!satisfies_invariant(global_subcritical_params(r, s, n), r, s, n)) ++fails;
      } else if (crit == Criticality::Supercritical) {
        if (!satisfies_invariant(supercritical_params(r, s, n, ScheduleKind::GlobalSupercritical), r, s, n)) ++fails;
        if (!satisfies_invariant(local_params(r, s, n), r, s, n)) ++fails;
      }
    } catch (const Error&) {
      ++fails;
    }
  }
  c.expect(fails == 0, "schedule invariant failures: " + std::to_string(fails) + " of 500");
  return {1, "", c.passed(), c.lines()};
}

// --- AC2 ----------------------------------------------------------------------

CriterionResult free_propagator() {
  Checks c;
  const Grid g(1, 20.0, 512);
  const auto u0 = ComplexField::from_function(g, [](const std::array<double, 3>& x) { return std::exp(-0.5 * x[0] * x[0]); });
  double worst = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.1 * i;
    const auto exact = ComplexField::from_function(g, [&](const std::array<double, 3>& x) {
      const Complex a(1.0, -2.0 * t);
      return std::pow(a, -0.5) * std::exp(-x[0] * x[0] / (2.0 * a));
    });
    ComplexField d = free_propagate(u0, t);
    d -= exact;
    worst = std::max(worst, lq_norm(d, 2.0));
  }
  c.expect(worst < 1e-8, fmt("max L2 error vs closed form %.3g (< 1e-8)", worst));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  double dev = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Grid gr(1 + trial % 3, 5.0 + trial, trial % 3 == 2 ? 16 : 64);
    std::vector<Complex> v(gr.size());
    for (auto& z : v) z = Complex(nd(rng), nd(rng));
    const ComplexField u(gr, v);
    const double t = std::uniform_real_distribution<double>(-10, 10)(rng);
    dev = std::max(dev, std::abs(lq_norm(free_propagate(u, t), 2.0) / lq_norm(u, 2.0) - 1.0));
  }
  c.expect(dev < 1e-12, fmt("unitarity deviation %.3g (< 1e-12)", dev));
  return {2, "", c.passed(), c.lines()};
}

// --- AC3 ----------------------------------------------------------------------

CriterionResult dispersive_decay() {
  Checks c;
  std::vector<double> times;
  for (int i = 0; i < 8; ++i) times.push_back(0.5 * std::pow(8.0, i / 7.0));
  for (int n : {1, 2}) {
    const Grid g(n, 80.0, 1024);
    const double sigma = 0.5;
    const auto u0 = ComplexField::from_function(g, [&](const std::array<double, 3>& x) {
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
      return std::exp(-r2 / (2 * sigma * sigma));
    });
    const DecayFit fit = dispersive_decay_fit(u0, times);
    const double rel = std::abs(fit.slope - fit.predicted) / std::abs(fit.predicted);
    c.expect(rel < 0.05, fmt("n = %.0f: slope %.4f vs %.1f", n, fit.slope, fit.predicted) + fmt(", relative gap %.3g (< 0.05)", rel));
  }
  return {3, "", c.passed(), c.lines()};
}

// --- AC4 ----------------------------------------------------------------------

// Periodic spectral second-derivative matrix on N points over a box of
// length 2L (even N).
Eigen::MatrixXd second_derivative_matrix(int N, double L) {
  Eigen::MatrixXd D(N, N);
  const double h = 2 * M_PI / N;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) {
        D(i, j) = -M_PI * M_PI / (3 * h * h) - 1.0 / 6.0;
      } else {
        const double s = std::sin((i - j) * h / 2);
        D(i, j) = -((i - j) % 2 == 0 ? 1.0 : -1.0) / (2 * s * s);
      }
    }
  return D * std::pow(M_PI / L, 2);
}

double dense_ground_mu(const ComplexField& w) {
  const int N = w.grid().points();
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N) - second_derivative_matrix(N, w.grid().half_width());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) B(i, i) = w[i].real();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, A);
  return 1.0 / es.eigenvalues().maxCoeff();
}

CriterionResult ground_state() {
  Checks c;
  const Grid g(1, 12.0, 64);
  const auto w = gaussian_weight(g);
  const GroundPair gp = ground_pair(w);
  const double oracle = dense_ground_mu(w);
  const double rel = std::abs(gp.mu - oracle) / oracle;
  c.expect(rel < 1e-8, fmt("mu %.15g vs dense %.15g, relative %.3g (< 1e-8)", gp.mu, oracle, rel));
  c.expect(gp.residual < 1e-8, fmt("Euler-Lagrange residual %.3g (< 1e-8)", gp.residual));

  const ComplexField df = partial_derivative(gp.f, 0);
  const double energy = std::pow(lq_norm(df, 2.0), 2) + std::pow(lq_norm(gp.f, 2.0), 2);
  const double var = std::abs(gp.mu - energy);
  c.expect(var < 1e-8, fmt("variational identity gap %.3g (< 1e-8)", var));
  double constraint = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) constraint += w[i].real() * std::norm(gp.f[i]);
  constraint *= g.cell_volume();
  c.expect(std::abs(constraint - 1) < 1e-10, fmt("constraint integral %.15g", constraint));

  const double ref = ground_pair(gaussian_weight(Grid(1, 12.0, 256))).mu;
  std::vector<double> errs;
  for (int N : {16, 32}) errs.push_back(std::abs(ground_pair(gaussian_weight(Grid(1, 12.0, N))).mu - ref));
  const double order = std::log2(errs[0] / errs[1]);
  c.expect(order >= 2, fmt("mu errors %.3g (N=16), %.3g (N=32): order %.2f (>= 2)", errs[0], errs[1], order));
  return {4, "", c.passed(), c.lines()};
}

// --- AC5 ----------------------------------------------------------------------

CriterionResult standing_wave() {
  Checks c;
  const Grid g(2, 16.0, 128);
  const Profiles p = standing_wave_profiles(g, 1.0);
  EvolveOptions opts;
  opts.sample_every = 50;
  const SolveReport rep =
      split_step_evolve(p.u0, PotentialSpec::static_profile(p.W), nullptr, {0.0, 5.0}, 1e-3, opts);
  const double norm0 = lq_norm(p.u0, 2.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < rep.trajectory.size(); ++j) {
    ComplexField expect = p.u0;
    expect *= std::polar(1.0, -rep.trajectory.times[j]);
    expect -= rep.trajectory.states[j];
    worst = std::max(worst, lq_norm(expect, 2.0) / norm0);
  }
  c.expect(worst < 1e-3, fmt("max ||u(t) - e^{-it}u0|| / ||u0|| = %.3g over %.0f samples (< 1e-3)", worst,
                             static_cast<double>(rep.trajectory.size())));
  c.expect(rep.energy_drift < 1e-10, fmt("energy drift %.3g (< 1e-10)", rep.energy_drift));
  return {5, "", c.passed(), c.lines()};
}

// --- AC6 ----------------------------------------------------------------------

CriterionResult contraction_solver() {
  Checks c;
  const Grid g(2, 12.0, 64);
  const Profiles p = standing_wave_profiles(g, 1.0);
  const PotentialSpec V = PotentialSpec::static_profile(p.W);
  const ExtExponent r(2), s(2);
  const double dt = 0.005;
  const double tau = calibrate_tau({V}, p.u0, r, s, dt);
  c.note(fmt("calibrated tau %.6g, C-hat %.6g", tau, constant_estimate(tau)));

  GlobalOptions go;
  go.sample_every = 20;
  go.pairs = {{E(4), E(4)}, {kInfExp, E(2)}};
  const SolveReport glob = solve_global(p.u0, nullptr, V, {0.0, 10.0}, r, s, tau, dt, go);
  double max_factor = 0.0;
  int max_iter = 0;
  for (const auto& pc : glob.pieces) {
    for (double f : pc.contraction_factors) max_factor = std::max(max_factor, f);
    max_iter = std::max(max_iter, pc.iterations);
  }
  c.expect(max_factor <= 0.6, fmt("%.0f pieces, max contraction factor %.4f (<= 0.6)",
                                  static_cast<double>(glob.pieces.size()), max_factor));
  c.note("max iterations per piece: " + std::to_string(max_iter));

  EvolveOptions eo;
  eo.sample_every = 20;
  const SolveReport split = split_step_evolve(p.u0, V, nullptr, {0.0, 10.0}, dt, eo);
  double gap = 0.0, scale = 0.0;
  const bool aligned = split.trajectory.size() == glob.trajectory.size();
  c.expect(aligned, "trajectories share sample times");
  if (aligned) {
    for (std::size_t j = 0; j < split.trajectory.size(); ++j) {
      ComplexField d = glob.trajectory.states[j];
      d -= split.trajectory.states[j];
      gap = std::max(gap, lq_norm(d, 2.0));
      scale = std::max(scale, split.trajectory.energy_log[j]);
    }
    c.expect(gap / scale < 1e-3, fmt("relative LinfL2 gap to split-step %.3g (< 1e-3)", gap / scale));
  }
  c.expect(glob.energy_drift < 1e-6, fmt("fixed-point energy drift %.3g (< 1e-6)", glob.energy_drift));
  bool bounded = true;
  for (const auto& sr : glob.strichartz_ratios) bounded = bounded && std::isfinite(sr.ratio) && sr.ratio <= glob.bound;
  c.expect(bounded, fmt("Strichartz ratios finite and below k(1+2C)^k = %.3g", glob.bound));

  const auto gauss = gaussian_weight(g);
  const auto free_run = duhamel_iterate(p.u0, nullptr, PotentialSpec::zero(), {0.0, 1.0}, 50);
  const Source F = [&](double t, const Grid&) {
    ComplexField f = gauss;
    f *= std::cos(t);
    return f;
  };
  const auto forced = duhamel_iterate(p.u0, F, PotentialSpec::zero(), {0.0, 1.0}, 50);
  c.expect(free_run.iterations == 1 && forced.iterations == 1,
           "V = 0 iterations: " + std::to_string(free_run.iterations) + " (F = 0), " +
               std::to_string(forced.iterations) + " (F != 0)");
  return {6, "", c.passed(), c.lines()};
}

// --- AC7 ----------------------------------------------------------------------

struct StepInstance {
  PotentialSpec spec;
  std::vector<double> knots;
  std::vector<double> amps;
  double w_snorm;
  double r;
  double s;
};

// Exact ∫_a^b |a(t)|^r dt ‖w‖_s^r for a step amplitude held constant outside
// the knots.
double step_power_integral(const StepInstance& inst, double a, double b) {
  auto amp_on = [&](double t) {
    std::size_t idx = 0;
    while (idx + 1 < inst.knots.size() && inst.knots[idx + 1] <= t) ++idx;
    return inst.amps[idx];
  };
  std::vector<double> cuts{a};
  for (double k : inst.knots)
    if (k > a && k < b) cuts.push_back(k);
  cuts.push_back(b);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    acc += (cuts[i + 1] - cuts[i]) * std::pow(std::abs(amp_on(mid)), inst.r);
  }
  return acc * std::pow(inst.w_snorm, inst.r);
}

int minimal_piece_count(const std::vector<double>& contrib, double budget) {
  const std::size_t m = contrib.size();
  std::vector<int> best(m + 1, 1 << 30);
  best[0] = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    double sum = 0.0;
    for (std::size_t j = i; j-- > 0;) {
      sum += contrib[j];
      if (sum > budget) break;
      best[i] = std::min(best[i], best[j] + 1);
    }
  }
  return best[m];
}

CriterionResult partitioner() {
  Checks c;
  const Grid g(2, 4.0, 16);
  const auto w = gaussian_weight(g);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0, 1);
  const double r_choices[] = {1.0, 1.5, 2.0, 3.0, 4.0};
  const double s_choices[] = {1.0, 2.0, 3.0, 6.0};
  int tiling_fail = 0, bound_fail = 0, count_fail = 0, compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    StepInstance inst;
    const int knots = 2 + static_cast<int>(rng() % 9);
    for (int k = 0; k < knots; ++k) inst.knots.push_back(U(rng));
    std::sort(inst.knots.begin(), inst.knots.end());
    inst.knots.front() = 0.0;
    for (int k = 0; k < knots; ++k) inst.amps.push_back(4 * U(rng) - 2);
    inst.r = r_choices[rng() % 5];
    inst.s = s_choices[rng() % 4];
    inst.w_snorm = lq_norm(w, inst.s);
    inst.spec = PotentialSpec::modulated(w, inst.knots, inst.amps, Interpolation::Step);
    const int slices = 8 + static_cast<int>(rng() % 57);
    const double dt = 1.0 / slices;

    std::vector<double> contrib;
    for (int i = 0; i < slices; ++i)
      contrib.push_back(step_power_integral(inst, i * dt, i + 1 == slices ? 1.0 : (i + 1) * dt));
    const double max_slice = std::pow(*std::max_element(contrib.begin(), contrib.end()), 1.0 / inst.r);
    const double tau = max_slice * (1.0 + 3.0 * U(rng)) + 1e-12;

    const ExtExponent r = ExtExponent::parse(std::to_string(inst.r)), s = ExtExponent::parse(std::to_string(inst.s));
    const Partition part = partition_interval(inst.spec, r, s, {0.0, 1.0}, tau, dt, g);
    bool tiles = !part.pieces.empty() && part.pieces.front().start == 0.0 && part.pieces.back().end == 1.0;
    for (std::size_t i = 1; i < part.pieces.size(); ++i) tiles = tiles && part.pieces[i].start == part.pieces[i - 1].end;
    if (!tiles) ++tiling_fail;
    for (const auto& pc : part.pieces)
      if (mixed_norm(inst.spec, r, s, {pc.start, pc.end}, dt, g) > tau * (1 + 1e-9)) ++bound_fail;
    ++compared;
    if (static_cast<int>(part.count()) != minimal_piece_count(contrib, std::pow(tau, inst.r) * (1 + 1e-12)))
      ++count_fail;
  }
  c.expect(tiling_fail == 0, "tiling failures: " + std::to_string(tiling_fail) + " of 100");
  c.expect(bound_fail == 0, "pieces above tau: " + std::to_string(bound_fail));
  c.expect(count_fail == 0, "greedy vs brute-force minimal count mismatches: " + std::to_string(count_fail) + " of " +
                                std::to_string(compared));
  return {7, "", c.passed(), c.lines()};
}

// --- AC8 ----------------------------------------------------------------------

CriterionResult scaling_law() {
  Checks c;
  std::mt19937_64 rng(2024);
  double worst = 0.0, worst_critical = 0.0;
  int critical_cases = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const Grid g = n == 2 ? Grid(2, 6.0, 32) : Grid(3, 6.0, 16);
    const auto W = gaussian_weight(g, 1.5, 1.0);
    const ExtExponent r = trial % 7 == 3 ? kInfExp : ExtExponent(random_rational(rng, 1, 8));
    ExtExponent s(2);
    if (trial % 3 == 0) {
      s = ExtExponent::from_reciprocal(2 * (1 - r.reciprocal()) / n);
    } else {
      s = rng() % 5 == 0 ? kInfExp : ExtExponent(random_rational(rng, 1, 8));
    }
    const bool critical = classify_potential(r, s, n).criticality == Criticality::Critical;
    const double expo = to_double(scaling_exponent(r, s, n));
    const PotentialSpec V = PotentialSpec::static_profile(W);
    const double base = mixed_norm(V, r, s, {0.0, 1.0}, 0.01, g);
    for (double eps : {0.5, 2.0}) {
      const PotentialSpec Ve = rescale_potential(V, eps);
      const double scaled = mixed_norm(Ve, r, s, {0.0, 1.0 / (eps * eps)}, 0.01 / (eps * eps), g);
      const double predicted = std::pow(eps, expo) * base;
      const double rel = std::abs(scaled - predicted) / predicted;
      worst = std::max(worst, rel);
      if (critical) worst_critical = std::max(worst_critical, std::abs(scaled / base - 1));
    }
    if (critical) ++critical_cases;
  }
  c.expect(worst < 1e-6, fmt("max relative deviation from eps^{2(1-rho)} %.3g (< 1e-6)", worst));
  c.expect(critical_cases > 0 && worst_critical < 1e-6,
           fmt("critical cases %.0f, max |ratio - 1| %.3g", critical_cases, worst_critical));
  return {8, "", c.passed(), c.lines()};
}

// --- AC9 / AC12 -------------------------------------------------------------

struct FamilyCase {
  FamilyKind kind;
  ExtExponent r;
  ExtExponent s;
};

std::vector<FamilyCase> cascade_cases() {
  return {{FamilyKind::GlobalSubcritical, E(4), E(6)},
          {FamilyKind::GlobalSupercritical, E(1), E(2)},
          {FamilyKind::Local, E(1), E(2)}};
}

CounterexampleFamily make_cascade(const FamilyCase& fc, int K) {
  const Profiles& p = profiles_3d();
  return build_family(fc.kind, fc.r, fc.s, 3, p.W, p.u0, K,
                      fc.kind == FamilyKind::Local ? std::optional<double>(1.0) : std::nullopt);
}

CriterionResult divergence() {
  Checks c;
  profiles_3d();
  const auto t0 = Clock::now();
  for (const auto& fc : cascade_cases()) {
    const auto fam = make_cascade(fc, 200);
    const auto& rep = *fam.patched_report;
    const bool certified = rep.convergent && std::isfinite(fam.certified_bound) &&
                           fam.analytic_potential_norm <= fam.certified_bound * (1 + 1e-12);
    c.expect(certified, std::string(to_string(fc.kind)) +
                            fmt(": potential norm %.6g, certified bound %.6g, summand exponent %.4g",
                                fam.analytic_potential_norm, fam.certified_bound, rep.summand_exponent));
    for (auto [p, q] : {std::pair{E(2), E(6)}, std::pair{E(8, 3), E(4)}}) {
      const RatioSeries rs = ratio_series(fam, p, q, std::pair{10, 200});
      const double slope = rs.fitted_slope.value_or(NAN);
      const double rel = std::abs(slope - rs.predicted_slope) / rs.predicted_slope;
      bool monotone = true;
      for (std::size_t i = 10; i < rs.ratio.size(); ++i) monotone = monotone && rs.ratio[i] > rs.ratio[i - 1];
      const double growth = rs.ratio.back() / rs.ratio.front();
      const std::string tag = std::string(to_string(fc.kind)) + " (" + p.str() + "," + q.str() + ")";
      c.expect(rel < 0.1 && rs.predicted_slope > 0,
               tag + fmt(": slope %.6f vs predicted %.6f, relative %.3g (< 0.1)", slope, rs.predicted_slope, rel));
      c.expect(growth > 10, tag + fmt(": R_200 / R_1 = %.4g (> 10)", growth));
      c.expect(monotone, tag + ": R_k increasing on [10, 200]");
    }
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 10, fmt("analytic-mode runtime %.2fs (< 10s)", secs));
  return {9, "", c.passed(), c.lines()};
}

CriterionResult energy_pair_exclusion() {
  Checks c;
  const Profiles& p = profiles_3d();
  double worst = 0.0;
  for (const auto& fc : cascade_cases()) {
    const RatioSeries rs = ratio_series(make_cascade(fc, 200), kInfExp, E(2));
    for (double v : rs.ratio) worst = std::max(worst, std::abs(v - 1));
    c.expect(rs.excluded, std::string(to_string(fc.kind)) + ": (inf,2) flagged as excluded");
  }
  const auto pc = pseudoconformal_build(p.W, p.u0, E(1), E(2), 3, 0.1);
  const RatioSeries rs = ratio_series(pc.family, kInfExp, E(2));
  for (double v : rs.ratio) worst = std::max(worst, std::abs(v - 1));
  c.expect(worst < 1e-10, fmt("max |R_k - 1| over all families %.3g (< 1e-10)", worst));
  return {12, "", c.passed(), c.lines()};
}

// --- AC10 ---------------------------------------------------------------------

CriterionResult window_check() {
  Checks c;
  const auto fam = make_cascade(cascade_cases()[0], 3);
  const auto checks = window_crosscheck(fam, {1, 2, 3}, 0.05, {{E(2), E(6)}, {E(8, 3), E(4)}});
  for (const auto& wc : checks) {
    const double e_rel = std::abs(wc.energy_start - wc.energy_expected) / wc.energy_expected;
    c.expect(e_rel < 0.01, "window " + std::to_string(wc.k) +
                               fmt(": start energy %.6g vs %.6g, relative %.3g (< 0.01)", wc.energy_start,
                                   wc.energy_expected, e_rel));
    for (const auto& wn : wc.norms)
      c.expect(wn.relative_error() < 0.02, "window " + std::to_string(wc.k) + " (" + wn.p.str() + "," + wn.q.str() +
                                               ")" + fmt(": %.6g vs closed form %.6g, relative %.3g (< 0.02)",
                                                         wn.numeric, wn.closed_form, wn.relative_error()));
    c.note("window " + std::to_string(wc.k) + fmt(": eps %.6g, %.0f steps, phase error %.3g", wc.eps, wc.steps,
                                                   wc.phase_error));
  }
  return {10, "", c.passed(), c.lines()};
}

// --- AC11 ---------------------------------------------------------------------

CriterionResult pseudoconformal() {
  Checks c;
  const Grid native(2, 16.0, 128);
  const Profiles p = standing_wave_profiles(native, 1.0);
  const ExtExponent r(1), s(3, 2);
  const std::vector<std::pair<ExtExponent, ExtExponent>> pairs{{E(4), E(4)}, {E(3), E(6)}};
  double worst_pot = 0.0, worst_sol = 0.0;
  for (double delta : {0.1, 0.25, 0.5}) {
    const auto pf = pseudoconformal_build(p.W, p.u0, r, s, 2, delta);
    const double numeric = mixed_norm(pf.family.potential, r, s, {delta, 1.0}, 1e-4, native);
    worst_pot = std::max(worst_pot, std::abs(numeric - pf.family.analytic_potential_norm) /
                                        pf.family.analytic_potential_norm);
    for (const auto& [pp, qq] : pairs) {
      const double num = pf.solution_norm(pp, qq, delta, 1e-4);
      const double closed = pf.solution_norm_closed_form(pp, qq, delta);
      worst_sol = std::max(worst_sol, std::abs(num - closed) / closed);
    }
  }
  c.expect(worst_pot < 1e-6, fmt("potential norm: max relative gap %.3g (< 1e-6)", worst_pot));
  c.expect(worst_sol < 1e-6, fmt("solution norms: max relative gap %.3g (< 1e-6)", worst_sol));

  const auto pf = pseudoconformal_build(p.W, p.u0, r, s, 2, 0.1);
  for (double T : {0.3, 0.6, 0.9}) {
    std::vector<double> res;
    for (int N : {32, 64, 128}) res.push_back(pf.residual(T, Grid(2, 14.0 * T, N)));
    const double f1 = res[0] / res[1], f2 = res[1] / res[2];
    c.expect(f1 >= 4 && f2 >= 4, fmt("T = %.1f: residual %.3g -> %.3g", T, res[0], res[1]) +
                                     fmt(" -> %.3g, reduction factors %.3g, %.3g (>= 4)", res[2], f1, f2));
  }

  for (const auto& [pp, qq] : pairs) {
    std::vector<double> x, y;
    for (double delta : {0.5, 0.25, 0.1, 0.05}) {
      x.push_back(std::log(1 / delta - 1));
      y.push_back(std::log(pf.solution_norm(pp, qq, delta, 1e-4)));
    }
    const double slope = least_squares_slope(x, y);
    const double predicted = to_double(pp.reciprocal());
    const double rel = std::abs(slope - predicted) / predicted;
    c.expect(rel < 0.05, "(" + pp.str() + "," + qq.str() + ")" +
                             fmt(": growth slope %.5f vs %.5f, relative %.3g (< 0.05)", slope, predicted, rel));
  }
  return {11, "", c.passed(), c.lines()};
}

struct Entry {
  const char* title;
  CriterionResult (*run)();
};

const Entry kEntries[] = {
    {"exponent algebra", exponent_algebra},
    {"free propagator", free_propagator},
    {"dispersive decay", dispersive_decay},
    {"ground state", ground_state},
    {"standing wave", standing_wave},
    {"contraction solver", contraction_solver},
    {"partitioner", partitioner},
    {"scaling law", scaling_law},
    {"counterexample divergence", divergence},
    {"window cross-check", window_check},
    {"pseudoconformal family", pseudoconformal},
    {"(inf,2) exclusion", energy_pair_exclusion},
};

constexpr double kRuntimeLimit[] = {1, 5, 30, 0, 0, 0, 0, 0, 0, 0, 0, 0};

}  // namespace

int criterion_count() { return static_cast<int>(std::size(kEntries)); }

std::string criterion_title(int id) {
  if (id < 1 || id > criterion_count()) return "unknown";
  return kEntries[id - 1].title;
}

CriterionResult run_criterion(int id) {
  CriterionResult res;
  res.id = id;
  res.title = criterion_title(id);
  if (id < 1 || id > criterion_count()) {
    res.details.push_back("no such criterion");
    return res;
  }
  const auto t0 = Clock::now();
  try {
    CriterionResult r = kEntries[id - 1].run();
    res.passed = r.passed;
    res.details = std::move(r.details);
  } catch (const std::exception& e) {
    res.passed = false;
    res.details.push_back(std::string("FAILED with error: ") + e.what());
  }
  res.seconds = seconds_since(t0);
  const double limit = kRuntimeLimit[id - 1];
  if (limit > 0) {
    const bool fast = res.seconds < limit;
    res.passed = res.passed && fast;
    res.details.push_back(std::string(fast ? "" : "FAILED ") + fmt("runtime %.2fs (< %.0fs)", res.seconds, limit));
  }
  return res;
}

std::vector<CriterionResult> run_all(const std::vector<int>& ids) {
  std::vector<int> todo = ids;
  if (todo.empty())
    for (int i = 1; i <= criterion_count(); ++i) todo.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : todo) out.push_back(run_criterion(id));
  return out;
}

std::string summary_line(const CriterionResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "AC%d %s %s (%.2fs)", r.id, r.passed ? "PASS" : "FAIL", r.title.c_str(), r.seconds);
  return buf;
}

}  // namespace strz::acceptance
