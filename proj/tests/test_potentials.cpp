#include <doctest.h>

#include "strz/error.hpp"
#include "strz/groundstate.hpp"
#include "strz/potentials.hpp"
#include "strz/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace strz;

namespace {

ExtExponent E(long long a, long long b = 1) { return ExtExponent(a, b); }
const ExtExponent Inf = ExtExponent::infinity();

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Usage;
}

// Fewest contiguous groups of slices whose summed contributions stay within
// the budget; exhaustive dynamic programming.
int fewest_pieces(const std::vector<double>& contrib, double budget) {
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

}  // namespace

TEST_CASE("zeta values") {
  CHECK(zeta(2.0) == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-12));
  CHECK(zeta(4.0) == doctest::Approx(std::pow(M_PI, 4) / 90).epsilon(1e-12));
  CHECK(zeta(1.5) == doctest::Approx(2.612375348685488).epsilon(1e-10));
}

TEST_CASE("schedules") {
  const ScheduleParams sub{make_rational(3), make_rational(2), ScheduleKind::GlobalSubcritical};
  const Schedule a = make_schedule(sub, 4);
  REQUIRE(a.windows.size() == 4);
  CHECK(a.windows[0].start == 0.0);
  CHECK(a.windows[2].length == doctest::Approx(27.0));
  CHECK(a.windows[3].eps == doctest::Approx(0.25));
  for (std::size_t k = 1; k < 4; ++k) CHECK(a.windows[k].start >= a.windows[k - 1].end());

  const ScheduleParams sup{make_rational(3, 2), make_rational(2), ScheduleKind::GlobalSupercritical};
  const Schedule b = make_schedule(sup, 5);
  CHECK(b.windows[4].start == doctest::Approx(5.0));
  CHECK(b.windows[4].length == doctest::Approx(std::pow(5.0, -1.5)));
  CHECK(b.windows[4].eps == doctest::Approx(5.0));

  const ScheduleParams loc{make_rational(3, 2), make_rational(2), ScheduleKind::Local};
  const Schedule c = make_schedule(loc, 50, 2.0);
  CHECK(c.length_scale * zeta(1.5) == doctest::Approx(2.0));
  CHECK(c.windows[1].start == doctest::Approx(c.windows[0].end()));
  CHECK(c.end() < 2.0);

  CHECK(c.window_at(0.0) == std::optional<std::size_t>(0));
  CHECK(c.window_at(c.windows[1].start) == std::optional<std::size_t>(1));
  CHECK(c.window_at(c.windows[1].start, Side::Left) == std::optional<std::size_t>(0));
  CHECK(b.window_at(1.5) == std::optional<std::size_t>(0));
  CHECK_FALSE(b.window_at(2.5).has_value());

  CHECK(kind_of([] { make_schedule({make_rational(1, 2), make_rational(2), ScheduleKind::Local}, 3); }) ==
        ErrorKind::WrongRegime);
}

TEST_CASE("modulated amplitudes") {
  const Grid g(1, 4.0, 16);
  const auto w = gaussian_weight(g);
  Modulated step{w, {0.0, 1.0, 2.0}, {1.0, 3.0, 5.0}, Interpolation::Step};
  CHECK(step.amplitude(-1.0) == 1.0);
  CHECK(step.amplitude(0.5) == 1.0);
  CHECK(step.amplitude(1.0) == 3.0);
  CHECK(step.amplitude(1.0, Side::Left) == 1.0);
  CHECK(step.amplitude(9.0) == 5.0);
  Modulated lin{w, {0.0, 1.0, 2.0}, {1.0, 3.0, 5.0}, Interpolation::Linear};
  CHECK(lin.amplitude(0.25) == doctest::Approx(1.5));
  CHECK(lin.amplitude(1.5) == doctest::Approx(4.0));
  CHECK(lin.amplitude(3.0) == 5.0);
}

TEST_CASE("evaluation") {
  const Grid g(2, 8.0, 32);
  const auto w = gaussian_weight(g, 2.0);
  CHECK(lq_norm(evaluate(PotentialSpec::static_profile(w), 3.0, g) - w, 2.0) == 0.0);
  CHECK(lq_norm(evaluate(PotentialSpec::zero(), 1.0, g), 2.0) == 0.0);
  const auto pc = PotentialSpec::pseudoconformal(w);
  CHECK(kind_of([&] { evaluate(pc, 0.0, g); }) == ErrorKind::Singularity);
  // T^{-2} W(X/T) for a Gaussian weight of width 1 is a Gaussian of width T.
  const double T = 0.5;
  auto expect = gaussian_weight(g, 2.0, T);
  expect *= 1 / (T * T);
  CHECK(lq_norm(evaluate(pc, T, g) - expect, 2.0) < 1e-9 * lq_norm(expect, 2.0));
  CHECK(kind_of([&] { PotentialSpec::static_profile(Complex(0, 1) * w); }) == ErrorKind::Precondition);
  CHECK(std::string(pc.kind_name()) == "pseudoconformal");
}

TEST_CASE("mixed norms of simple potentials") {
  const Grid g(2, 8.0, 32);
  const auto w = gaussian_weight(g, 1.5);
  const auto V = PotentialSpec::static_profile(w);
  for (const auto& s : {E(1), E(2), E(3), Inf}) {
    const double ws = lq_norm(w, s);
    CHECK(mixed_norm(V, E(2), s, {0.0, 4.0}, 0.1, g) == doctest::Approx(2.0 * ws).epsilon(1e-12));
    CHECK(mixed_norm(V, Inf, s, {0.0, 4.0}, 0.1, g) == doctest::Approx(ws).epsilon(1e-12));
  }
  // a(t) = t on [0, 1]: ∫ t^3 dt = 1/4.
  const auto ramp = PotentialSpec::modulated(w, {0.0, 1.0}, {0.0, 1.0}, Interpolation::Linear);
  CHECK(mixed_norm(ramp, E(3), E(2), {0.0, 1.0}, 1e-3, g) ==
        doctest::Approx(std::pow(0.25, 1.0 / 3) * lq_norm(w, 2.0)).epsilon(1e-6));
}

TEST_CASE("patched norm: quadrature agrees with the exact truncated norm") {
  const Grid g(3, 8.0, 16);
  const auto w = gaussian_weight(g, 1.0, 1.0);
  const auto r = E(1), s = E(2);
  const Schedule sched = make_schedule(supercritical_params(r, s, 3, ScheduleKind::GlobalSupercritical), 4);
  const auto V = PotentialSpec::patched(w, sched);
  const auto rep = analytic_patched_norm(sched, r, s, 3, lq_norm(w, s));
  const double numeric = mixed_norm(V, r, s, {0.0, sched.end() + 1.0}, 0.01, g);
  CHECK(numeric == doctest::Approx(rep.exact_norm).epsilon(1e-9));
  CHECK(rep.convergent);
  CHECK(rep.upper_bound() >= rep.exact_norm);
  CHECK(std::is_sorted(rep.partial_sums.begin(), rep.partial_sums.end()));
  const auto bps = V.breakpoints(0.0, sched.end() + 1.0);
  // Windows 1 and 2 share the edge t = 2.
  CHECK(bps.size() == 7);

  std::ostringstream csv;
  write_window_norms_csv(csv, sched, r, s, 3, lq_norm(w, s));
  const std::string text = csv.str();
  CHECK(text.rfind("k,start,length,eps,piece_norm\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("power integrals and the pseudoconformal norm") {
  CHECK(power_integral(-1.0, 0.5, 2.0) == doctest::Approx(std::log(4.0)));
  CHECK(power_integral(2.0, 0.0, 3.0) == doctest::Approx(9.0));
  const Grid g(2, 8.0, 64);
  const auto w = gaussian_weight(g);
  const auto r = E(1), s = E(3, 2);
  const double closed = analytic_pseudoconformal_norm(r, s, 2, 0.25, lq_norm(w, s));
  // ∫_{1/4}^1 T^{-2/3} dT = 3 (1 - 4^{-1/3}).
  CHECK(closed == doctest::Approx(3 * (1 - std::pow(4.0, -1.0 / 3)) * lq_norm(w, s)).epsilon(1e-12));
  const double numeric = mixed_norm(PotentialSpec::pseudoconformal(w), r, s, {0.25, 1.0}, 1e-3, g);
  CHECK(numeric == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("property: rescaling multiplies the norm by eps^{scaling exponent}") {
  std::mt19937_64 rng(5);
  const Grid g(2, 6.0, 32);
  const auto V = PotentialSpec::static_profile(gaussian_weight(g, 1.0));
  for (int i = 0; i < 20; ++i) {
    const auto r = E(2 + static_cast<long long>(rng() % 6), 1 + static_cast<long long>(rng() % 2));
    const auto s = E(1 + static_cast<long long>(rng() % 8));
    const double eps = std::pow(2.0, std::uniform_real_distribution<double>(-1, 1)(rng));
    const double base = mixed_norm(V, r, s, {0.0, 1.0}, 0.05, g);
    const double scaled =
        mixed_norm(rescale_potential(V, eps), r, s, {0.0, 1.0 / (eps * eps)}, 0.05 / (eps * eps), g);
    REQUIRE(scaled == doctest::Approx(std::pow(eps, to_double(scaling_exponent(r, s, 2))) * base).epsilon(1e-9));
  }
}

TEST_CASE("partition errors") {
  const Grid g(1, 4.0, 16);
  const auto V = PotentialSpec::static_profile(gaussian_weight(g, 1.0));
  CHECK(kind_of([&] { partition_interval(V, E(2), E(2), {0.0, 1.0}, 0.0, 0.1, g); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { partition_interval(V, E(2), E(2), {0.0, 1.0}, 1e-3, 0.1, g); }) ==
        ErrorKind::UnsplittableSlice);
  CHECK(kind_of([&] { partition_interval(V, Inf, E(2), {0.0, 1.0}, 1e-3, 0.1, g); }) ==
        ErrorKind::CannotPartition);
  const auto part = partition_interval(PotentialSpec::zero(), E(2), E(2), {0.0, 5.0}, 1.0, 0.1, g);
  CHECK(part.count() == 1);
}

TEST_CASE("property: greedy partition tiles, respects tau and is minimal") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0, 1);
  const Grid g(1, 4.0, 16);
  const auto w = gaussian_weight(g);
  for (int trial = 0; trial < 60; ++trial) {
    const int knots = 2 + static_cast<int>(rng() % 8);
    std::vector<double> t(knots), a(knots);
    for (auto& x : t) x = U(rng);
    std::sort(t.begin(), t.end());
    t.front() = 0.0;
    for (auto& x : a) x = 4 * U(rng) - 2;
    const double r = 1.0 + static_cast<double>(rng() % 4);
    const auto V = PotentialSpec::modulated(w, t, a, Interpolation::Step);
    const int slices = 4 + static_cast<int>(rng() % 61);
    const double dt = 1.0 / slices;
    const double ws = lq_norm(w, 2.0);

    // Exact slice contributions ∫|a|^r dt ‖w‖^r from the step function.
    std::vector<double> contrib(slices, 0.0);
    for (int i = 0; i < slices; ++i) {
      const double lo = i * dt, hi = i + 1 == slices ? 1.0 : (i + 1) * dt;
      std::vector<double> cuts{lo};
      for (double k : t)
        if (k > lo && k < hi) cuts.push_back(k);
      cuts.push_back(hi);
      for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const double mid = 0.5 * (cuts[j] + cuts[j + 1]);
        const auto idx = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), mid) - t.begin()) - 1;
        contrib[i] += (cuts[j + 1] - cuts[j]) * std::pow(std::abs(a[idx]), r) * std::pow(ws, r);
      }
    }
    const double tau = std::pow(*std::max_element(contrib.begin(), contrib.end()), 1 / r) * (1 + 2 * U(rng)) + 1e-12;
    const auto rr = ExtExponent(static_cast<long long>(r));
    const Partition part = partition_interval(V, rr, E(2), {0.0, 1.0}, tau, dt, g);
    REQUIRE(part.pieces.front().start == 0.0);
    REQUIRE(part.pieces.back().end == 1.0);
    for (std::size_t i = 1; i < part.count(); ++i) REQUIRE(part.pieces[i].start == part.pieces[i - 1].end);
    for (const auto& pc : part.pieces) REQUIRE(mixed_norm(V, rr, E(2), {pc.start, pc.end}, dt, g) <= tau * (1 + 1e-9));
    REQUIRE(static_cast<int>(part.count()) == fewest_pieces(contrib, std::pow(tau, r) * (1 + 1e-12)));
  }
}

TEST_CASE("sum potentials are partitioned per term") {
  const Grid g(2, 6.0, 32);
  const auto w = gaussian_weight(g);
  const auto a = PotentialSpec::static_profile(w);
  const auto b = PotentialSpec::modulated(w, {0.0, 1.0}, {0.0, 4.0}, Interpolation::Linear);
  const auto V = PotentialSpec::sum({{a, {E(2), E(2)}}, {b, {E(4), E(3)}}});
  const auto part = partition_interval(V, E(2), E(2), {0.0, 2.0}, 2.5, 0.01, g);
  CHECK(part.count() > 1);
  for (const auto& pc : part.pieces) {
    CHECK(mixed_norm(a, E(2), E(2), {pc.start, pc.end}, 0.01, g) <= 2.5 * (1 + 1e-9));
    CHECK(mixed_norm(b, E(4), E(3), {pc.start, pc.end}, 0.01, g) <= 2.5 * (1 + 1e-9));
  }
  CHECK(part.pieces.back().end == 2.0);
}
