#include <doctest.h>

#include "strz/error.hpp"
#include "strz/groundstate.hpp"
#include "strz/solver.hpp"
#include "strz/spectral.hpp"

#include <cmath>

using namespace strz;

namespace {

ExtExponent E(long long a, long long b = 1) { return ExtExponent(a, b); }
const ExtExponent Inf = ExtExponent::infinity();

double rel_gap(const ComplexField& a, const ComplexField& b) { return lq_norm(a - b, 2.0) / lq_norm(b, 2.0); }

ComplexField constant_field(const Grid& g, double c) {
  return ComplexField::from_function(g, [c](const std::array<double, 3>&) { return c; });
}

}  // namespace

TEST_CASE("z exponent") {
  CHECK(z_exponent(3) == 6.0);
  CHECK(z_exponent(2) == 8.0);
  CHECK(z_exponent(1, 12.0) == 12.0);
  CHECK(constant_estimate(0.25) == 2.0);
  CHECK(constant_estimate(4.0) == 1.0);
}

TEST_CASE("split-step: free and constant potentials are exact") {
  const Grid g(2, 10.0, 64);
  const auto u0 = gaussian_weight(g, 1.0, 1.5);
  const auto free = split_step_evolve(u0, PotentialSpec::zero(), nullptr, {0.0, 1.0}, 0.1);
  CHECK(rel_gap(free.trajectory.states.back(), free_propagate(u0, 1.0)) < 1e-12);
  CHECK(free.energy_drift < 1e-12);

  // V = c gives u(t) = e^{ict} e^{itΔ} u0.
  const double c = 0.7;
  const auto rep = split_step_evolve(u0, PotentialSpec::static_profile(constant_field(g, c)), nullptr, {0.0, 2.0}, 0.05);
  ComplexField expect = free_propagate(u0, 2.0);
  expect *= std::polar(1.0, 2.0 * c);
  CHECK(rel_gap(rep.trajectory.states.back(), expect) < 1e-12);
}

TEST_CASE("split-step: energy conservation and sampling") {
  const Grid g(2, 10.0, 64);
  const auto u0 = gaussian_weight(g, 1.0, 1.0, {1.0, 0.0, 0.0});
  const auto V = PotentialSpec::modulated(gaussian_weight(g, -3.0), {0.0, 1.0}, {1.0, -1.0}, Interpolation::Linear);
  EvolveOptions opts;
  opts.sample_every = 7;
  opts.pairs = {{Inf, E(2)}, {E(4), E(4)}};
  const auto rep = split_step_evolve(u0, V, nullptr, {0.0, 1.0}, 0.01, opts);
  CHECK(rep.energy_drift < 1e-10);
  CHECK(rep.trajectory.times.back() == doctest::Approx(1.0));
  CHECK(rep.trajectory.size() == 100 / 7 + 2);
  REQUIRE(rep.strichartz_ratios.size() == 2);
  CHECK(rep.strichartz_ratios[0].ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::isfinite(rep.strichartz_ratios[1].ratio));
}

TEST_CASE("split-step converges at second order") {
  const Grid g(1, 12.0, 128);
  const auto u0 = gaussian_weight(g, 1.0, 1.0, {0.5, 0.0, 0.0});
  const auto V = PotentialSpec::modulated(gaussian_weight(g, -2.0), {0.0, 1.0}, {1.0, 2.0}, Interpolation::Linear);
  const auto ref = split_step_evolve(u0, V, nullptr, {0.0, 1.0}, 1e-3).trajectory.states.back();
  const double e1 = rel_gap(split_step_evolve(u0, V, nullptr, {0.0, 1.0}, 0.04).trajectory.states.back(), ref);
  const double e2 = rel_gap(split_step_evolve(u0, V, nullptr, {0.0, 1.0}, 0.02).trajectory.states.back(), ref);
  CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("source term against the plane-wave closed form") {
  const Grid g(1, M_PI, 32);
  const double k = 2.0;
  const auto f = ComplexField::from_function(g, [k](const std::array<double, 3>& x) { return std::polar(1.0, k * x[0]); });
  const Source F = [&](double, const Grid&) { return f; };
  const ComplexField zero(g);
  const double T = 1.0;
  // u(T) = -i ∫_0^T e^{i(T-s)k²} ds f = -(e^{iTk²} - 1)/k² f.
  ComplexField expect = f;
  expect *= -(std::polar(1.0, T * k * k) - 1.0) / (k * k);
  const auto split = split_step_evolve(zero, PotentialSpec::zero(), F, {0.0, T}, 0.01);
  CHECK(rel_gap(split.trajectory.states.back(), expect) < 1e-3);
  const auto duh = duhamel_iterate(zero, F, PotentialSpec::zero(), {0.0, T}, 100);
  CHECK(duh.iterations == 1);
  CHECK(rel_gap(duh.trajectory.states.back(), expect) < 1e-3);
}

TEST_CASE("Duhamel iteration") {
  const Grid g(2, 10.0, 64);
  const auto u0 = gaussian_weight(g, 1.0, 1.2);
  const auto free = duhamel_iterate(u0, nullptr, PotentialSpec::zero(), {0.0, 1.0}, 20);
  CHECK(free.iterations == 1);
  CHECK(rel_gap(free.trajectory.states.back(), free_propagate(u0, 1.0)) < 1e-12);
  CHECK(free.trajectory.size() == 21);

  const auto V = PotentialSpec::static_profile(gaussian_weight(g, -1.0));
  const auto res = duhamel_iterate(u0, nullptr, V, {0.0, 0.5}, 50);
  CHECK(res.iterations > 1);
  CHECK(res.residual < 1e-9);
  for (double f : res.contraction_factors) CHECK(f < 1.0);
  const auto split = split_step_evolve(u0, V, nullptr, {0.0, 0.5}, 0.01);
  CHECK(rel_gap(res.trajectory.states.back(), split.trajectory.states.back()) < 1e-3);

  // Shorter pieces contract faster.
  const auto short_piece = duhamel_iterate(u0, nullptr, V, {0.0, 0.1}, 10);
  CHECK(short_piece.contraction_factors.front() < res.contraction_factors.front());

  IterationOptions tight;
  tight.max_iterations = 3;
  const auto strong = PotentialSpec::static_profile(gaussian_weight(g, -40.0));
  CHECK_THROWS_AS(duhamel_iterate(u0, nullptr, strong, {0.0, 2.0}, 200, tight), Error);
}

TEST_CASE("frozen-potential Duhamel iteration") {
  const Grid g(2, 10.0, 64);
  const auto u0 = gaussian_weight(g, 1.0, 1.2);
  const auto w = gaussian_weight(g, -1.0);
  const auto stat = frozen_duhamel(u0, nullptr, PotentialSpec::static_profile(w), {0.0, 0.5}, 50);
  CHECK(stat.iterations == 1);
  const auto slow = PotentialSpec::modulated(w, {0.0, 10.0}, {1.0, 2.0}, Interpolation::Linear);
  const auto fr = frozen_duhamel(u0, nullptr, slow, {0.0, 0.5}, 50);
  const auto split = split_step_evolve(u0, slow, nullptr, {0.0, 0.5}, 0.01);
  CHECK(rel_gap(fr.trajectory.states.back(), split.trajectory.states.back()) < 1e-3);
  const auto plain = duhamel_iterate(u0, nullptr, slow, {0.0, 0.5}, 50);
  CHECK(fr.contraction_factors.front() < plain.contraction_factors.front());
}

TEST_CASE("global solve chains pieces") {
  const Grid g(1, 12.0, 64);
  const auto u0 = gaussian_weight(g, 1.0, 1.0);
  const auto freerep = solve_global(u0, nullptr, PotentialSpec::zero(), {0.0, 2.0}, E(2), E(2), 1.0, 0.02);
  CHECK(freerep.pieces.size() == 1);
  CHECK(rel_gap(freerep.trajectory.states.back(), free_propagate(u0, 2.0)) < 1e-12);

  const auto V = PotentialSpec::static_profile(gaussian_weight(g, -2.0));
  GlobalOptions go;
  go.pairs = {{Inf, E(2)}};
  const auto rep = solve_global(u0, nullptr, V, {0.0, 2.0}, E(2), E(2), 0.5, 0.02, go);
  CHECK(rep.pieces.size() > 1);
  CHECK(rep.c_hat == 1.0);
  const double k = static_cast<double>(rep.pieces.size());
  CHECK(rep.bound == doctest::Approx(k * std::pow(3.0, k)));
  for (std::size_t i = 1; i < rep.pieces.size(); ++i) CHECK(rep.pieces[i].piece.start == rep.pieces[i - 1].piece.end);
  const auto split = split_step_evolve(u0, V, nullptr, {0.0, 2.0}, 0.02);
  CHECK(rel_gap(rep.trajectory.states.back(), split.trajectory.states.back()) < 1e-3);
  // Mass is conserved up to the Duhamel quadrature error.
  CHECK(rep.strichartz_ratios[0].ratio == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("tau calibration") {
  const Grid g(1, 12.0, 32);
  const auto u0 = gaussian_weight(g);
  CalibrationOptions co;
  co.bisection_steps = 12;
  CHECK(calibrate_tau({PotentialSpec::zero()}, u0, E(2), E(2), 0.05, co) == co.tau_cap);
  CHECK_THROWS_AS(calibrate_tau({}, u0, E(2), E(2), 0.05, co), Error);
  // On short pieces the Duhamel factor grows like A·length while the L²_t
  // norm is A·sqrt(length), so the threshold scales like sqrt(A).
  co.interval = {0.0, 10.0};
  const auto w = gaussian_weight(g, -1.0);
  const double t1 = calibrate_tau({PotentialSpec::static_profile(w)}, u0, E(2), E(2), 0.005, co);
  const double t2 = calibrate_tau({PotentialSpec::static_profile(4.0 * w)}, u0, E(2), E(2), 0.005, co);
  CHECK(std::isfinite(t1));
  CHECK(t1 < co.tau_cap);
  CHECK(t2 / t1 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("z norm of a free solution") {
  const Grid g(3, 8.0, 16);
  const auto u0 = gaussian_weight(g);
  Trajectory traj;
  for (int j = 0; j <= 10; ++j) traj.push(0.1 * j, free_propagate(u0, 0.1 * j));
  CHECK(z_norm(traj) >= lq_norm(u0, 2.0));
}
