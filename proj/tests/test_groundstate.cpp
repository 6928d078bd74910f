#include <doctest.h>

#include "strz/error.hpp"
#include "strz/groundstate.hpp"
#include "strz/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace strz;

namespace {

// Spectral second-derivative matrix on N periodic points over [-L, L).
Eigen::MatrixXd d2_matrix(int N, double L) {
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

// Smallest positive μ with (-Δ + 1) f = μ w f, from a dense generalized
// eigensolve.
double dense_mu(const ComplexField& w) {
  const Grid& g = w.grid();
  const int N = g.points();
  const Eigen::MatrixXd D = d2_matrix(N, g.half_width());
  const auto M = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(M, M);
  if (g.dim() == 1) {
    lap = D;
  } else {
    // Row-major (i, j) ↦ i N + j.
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
          lap(i * N + j, k * N + j) += D(i, k);
          lap(i * N + j, i * N + k) += D(j, k);
        }
  }
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(M, M) - lap;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M, M);
  for (Eigen::Index i = 0; i < M; ++i) B(i, i) = w[static_cast<std::size_t>(i)].real();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, A);
  return 1.0 / es.eigenvalues().maxCoeff();
}

double constraint(const GroundPair& gp) {
  double acc = 0.0;
  for (std::size_t i = 0; i < gp.w.size(); ++i) acc += gp.w[i].real() * std::norm(gp.f[i]);
  return acc * gp.w.grid().cell_volume();
}

}  // namespace

TEST_CASE("ground pair matches the dense eigensolve in 1D") {
  for (int N : {32, 64}) {
    const auto w = gaussian_weight(Grid(1, 12.0, N));
    const auto gp = ground_pair(w);
    CHECK(gp.mu == doctest::Approx(dense_mu(w)).epsilon(1e-9));
    CHECK(gp.residual < 1e-8);
    CHECK(euler_lagrange_residual(gp.f, w, gp.mu) < 1e-8);
    CHECK(constraint(gp) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gp.mu == doctest::Approx(gradient_energy(gp.f) + std::pow(lq_norm(gp.f, 2.0), 2)).epsilon(1e-9));
  }
}

TEST_CASE("ground pair matches the dense eigensolve in 2D") {
  const auto w = gaussian_weight(Grid(2, 8.0, 16), 1.0, 1.5);
  const auto gp = ground_pair(w);
  CHECK(gp.mu == doctest::Approx(dense_mu(w)).epsilon(1e-8));
}

TEST_CASE("sign-changing weights") {
  const Grid g(1, 12.0, 64);
  const auto w = gaussian_weight(g, 2.0, 1.0, {-2.0, 0.0, 0.0}) - gaussian_weight(g, 1.0, 1.0, {2.0, 0.0, 0.0});
  const auto gp = ground_pair(w);
  CHECK(gp.mu > 0);
  CHECK(gp.mu == doctest::Approx(dense_mu(w)).epsilon(1e-8));
  CHECK(constraint(gp) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("ground pair errors") {
  const Grid g(1, 12.0, 32);
  CHECK_THROWS_AS(ground_pair(gaussian_weight(g, -1.0)), Error);
  bool empty = false;
  try {
    ground_pair(ComplexField(g));
  } catch (const Error& e) {
    empty = e.kind() == ErrorKind::EmptyConstraint;
  }
  CHECK(empty);
  CHECK_THROWS_AS(ground_pair(Complex(0, 1) * gaussian_weight(g)), Error);
}

TEST_CASE("standing wave profile") {
  const auto gp = ground_pair(gaussian_weight(Grid(2, 12.0, 64)));
  const auto sw = standing_wave_potential(gp);
  CHECK(sw.residual < 1e-8);
  ComplexField expect = gp.w;
  expect *= -gp.mu;
  CHECK(lq_norm(sw.W - expect, 2.0) == 0.0);
  // -Δu0 + W u0 + u0 = 0 checked directly.
  ComplexField lhs = laplacian(sw.u0);
  lhs *= -1.0;
  lhs += sw.u0;
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] += sw.W[i] * sw.u0[i];
  CHECK(lq_norm(lhs, 2.0) / lq_norm(sw.u0, 2.0) < 1e-8);
}

TEST_CASE("convergence under grid refinement") {
  const double ref = ground_pair(gaussian_weight(Grid(1, 12.0, 256))).mu;
  const double e16 = std::abs(ground_pair(gaussian_weight(Grid(1, 12.0, 16))).mu - ref);
  const double e32 = std::abs(ground_pair(gaussian_weight(Grid(1, 12.0, 32))).mu - ref);
  CHECK(std::log2(e16 / e32) >= 2.0);
}
