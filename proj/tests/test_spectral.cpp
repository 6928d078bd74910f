#include <doctest.h>

#include "strz/error.hpp"
#include "strz/fft.hpp"
#include "strz/snapshot.hpp"
#include "strz/spectral.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace strz;

namespace {

ComplexField random_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<Complex> v(g.size());
  for (auto& z : v) z = Complex(nd(rng), nd(rng));
  return ComplexField(g, v);
}

double l2_distance(const ComplexField& a, const ComplexField& b) { return lq_norm(a - b, 2.0); }

ComplexField gaussian(const Grid& g, double sigma) {
  return ComplexField::from_function(g, [&](const std::array<double, 3>& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2 * sigma * sigma));
  });
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid g(2, 5.0, 16);
  CHECK(g.size() == 256);
  CHECK(g.spacing() == doctest::Approx(10.0 / 16));
  CHECK(g.coordinate(0) == -5.0);
  CHECK(g.cell_volume() == doctest::Approx(std::pow(10.0 / 16, 2)));
  CHECK(g.wavenumber(1) == doctest::Approx(2 * M_PI / 10));
  CHECK(g.wavenumber(8) == doctest::Approx(-8 * 2 * M_PI / 10));
  CHECK_THROWS_AS(Grid(4, 1.0, 16), Error);
  CHECK_THROWS_AS(Grid(1, 1.0, 12), Error);
  CHECK_THROWS_AS(Grid(1, -1.0, 16), Error);
}

TEST_CASE("fft round trip and plane waves") {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 3; ++n) {
    const Grid g(n, 3.0, n == 3 ? 8 : 32);
    const ComplexField u = random_field(g, rng);
    std::vector<Complex> d = u.data();
    fft::forward(d, g);
    fft::inverse(d, g);
    double err = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) err = std::max(err, std::abs(d[i] - u[i]));
    CHECK(err < 1e-12);
  }
  // A single mode lands in one bin with weight N.
  const Grid g(1, M_PI, 16);
  auto wave = ComplexField::from_function(g, [](const std::array<double, 3>& x) { return std::polar(1.0, 3 * x[0]); });
  std::vector<Complex> d = wave.data();
  fft::forward(d, g);
  int hits = 0;
  for (const auto& z : d)
    if (std::abs(z) > 1e-9) ++hits;
  CHECK(hits == 1);
}

TEST_CASE("laplacian and derivatives of a plane wave") {
  const Grid g(2, M_PI, 32);
  const auto wave = ComplexField::from_function(
      g, [](const std::array<double, 3>& x) { return std::polar(1.0, 2 * x[0] - 3 * x[1]); });
  ComplexField expect = wave;
  expect *= -13.0;
  CHECK(l2_distance(laplacian(wave), expect) < 1e-10);
  ComplexField dx = wave;
  dx *= Complex(0, 2);
  CHECK(l2_distance(partial_derivative(wave, 0), dx) < 1e-10);
  CHECK(gradient_energy(wave) == doctest::Approx(13 * std::pow(2 * M_PI, 2)));
}

TEST_CASE("norms of known fields") {
  const Grid g(1, 10.0, 256);
  const auto u = gaussian(g, 1.0);
  CHECK(lq_norm(u, 2.0) == doctest::Approx(std::pow(M_PI, 0.25)).epsilon(1e-12));
  CHECK(lq_norm(u, ExtExponent::infinity()) == doctest::Approx(1.0));
  CHECK(lq_norm(u, 4.0) == doctest::Approx(std::pow(std::sqrt(M_PI / 2), 0.25)).epsilon(1e-12));
  CHECK(lq_norm(u, 1.0) == doctest::Approx(std::sqrt(2 * M_PI)).epsilon(1e-12));
  CHECK(inner_product(u, u).real() == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("free propagator against the Gaussian closed form") {
  const Grid g(2, 20.0, 128);
  const auto u0 = gaussian(g, 1.0);
  for (double t : {-0.7, 0.3, 1.2}) {
    // For i u_t - Δu = 0, e^{-|x|²/2} evolves to (1-2it)^{-n/2} e^{-|x|²/(2(1-2it))}.
    const Complex a(1.0, -2.0 * t);
    const auto exact = ComplexField::from_function(g, [&](const std::array<double, 3>& x) {
      return std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2.0 * a)) / a;
    });
    CHECK(l2_distance(free_propagate(u0, t), exact) < 1e-9);
  }
}

TEST_CASE("property: free propagator is a unitary group") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> T(-5, 5);
  for (int trial = 0; trial < 30; ++trial) {
    const Grid g(1 + trial % 3, 2.0 + trial % 7, trial % 3 == 2 ? 8 : 32);
    const auto u = random_field(g, rng);
    const double s = T(rng), t = T(rng);
    const auto su = free_propagate(u, s);
    REQUIRE(std::abs(lq_norm(su, 2.0) - lq_norm(u, 2.0)) < 1e-12 * lq_norm(u, 2.0));
    REQUIRE(l2_distance(free_propagate(su, t), free_propagate(u, s + t)) < 1e-11 * lq_norm(u, 2.0));
    REQUIRE(l2_distance(free_propagate(su, -s), u) < 1e-11 * lq_norm(u, 2.0));
    FreePropagator P(g, s);
    ComplexField v = u;
    P.apply(v);
    REQUIRE(l2_distance(v, su) < 1e-12 * lq_norm(u, 2.0));
  }
}

TEST_CASE("dispersive decay fit") {
  const Grid g(1, 80.0, 1024);
  const auto u0 = gaussian(g, 0.5);
  const std::vector<double> times{0.5, 1.0, 2.0, 4.0};
  const auto fit = dispersive_decay_fit(u0, times);
  CHECK(fit.predicted == doctest::Approx(-0.5));
  CHECK(std::abs(fit.slope + 0.5) < 0.025);
  CHECK(least_squares_slope(std::vector<double>{0, 1, 2}, std::vector<double>{1, 3, 5}) == doctest::Approx(2.0));
}

TEST_CASE("box guard") {
  const Grid g(1, 10.0, 128);
  BoxGuard guard;
  CHECK(guard.shell_mass_fraction(gaussian(g, 1.0)) < 1e-20);
  const auto wide = gaussian(g, 6.0);
  CHECK(guard.shell_mass_fraction(wide) > 1e-3);
  CHECK_THROWS_AS(guard.check(wide, "test"), Error);
}

TEST_CASE("rescaling and band-limited resampling") {
  const Grid g(2, 12.0, 128);
  const auto u = gaussian(g, 1.0);
  // f(εx) with ε = 2 is a Gaussian of width 1/2.
  const auto squeezed = rescale_field(u, 2.0);
  CHECK(l2_distance(squeezed, gaussian(g, 0.5)) < 1e-10);
  // ‖f(ε·)‖_q = ε^{-n/q} ‖f‖_q.
  CHECK(lq_norm(squeezed, 3.0) == doctest::Approx(std::pow(2.0, -2.0 / 3) * lq_norm(u, 3.0)).epsilon(1e-9));
  const Grid fine(2, 12.0, 256);
  CHECK(l2_distance(resample_scaled(u, fine, 1.0), gaussian(fine, 1.0)) < 1e-10);
  CHECK_THROWS_AS(rescale_field(u, 0.1), Error);
}

TEST_CASE("snapshot round trip") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 3; ++n) {
    const Grid g(n, 1.5 * n, n == 3 ? 8 : 16);
    const auto u = random_field(g, rng);
    std::stringstream buf;
    write_snapshot(buf, u);
    const auto back = read_snapshot(buf);
    CHECK(back.grid() == g);
    CHECK(back.data() == u.data());
  }
  std::stringstream bad("NOPE");
  CHECK_THROWS_AS(read_snapshot(bad), Error);
}

TEST_CASE("fields reject non-finite values") {
  const Grid g(1, 1.0, 8);
  std::vector<Complex> v(8, Complex(1.0, 0.0));
  v[3] = Complex(NAN, 0);
  CHECK_THROWS_AS(ComplexField(g, v), Error);
  CHECK_THROWS_AS(ComplexField(g, std::vector<Complex>(7)), Error);
}
