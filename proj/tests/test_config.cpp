#include <doctest.h>

#include "strz/config.hpp"
#include "strz/error.hpp"
#include "strz/groundstate.hpp"
#include "strz/potential_config.hpp"
#include "strz/snapshot.hpp"
#include "strz/spectral.hpp"

#include <filesystem>
#include <random>

using namespace strz;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

std::string random_token(std::mt19937_64& rng, bool value) {
  static const std::string head = "abcdefghijklmnopqrstuvwxyz_";
  static const std::string tail = "abcdefghijklmnopqrstuvwxyz_0123456789-./:, ";
  const std::string& alphabet = value ? tail : head;
  std::string s(1, head[rng() % head.size()]);
  const int len = static_cast<int>(rng() % 12);
  for (int i = 0; i < len; ++i) s += (value ? alphabet : tail.substr(0, 37))[rng() % (value ? alphabet.size() : 37)];
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

TEST_CASE("parsing sections, comments and whitespace") {
  const auto cfg = ExperimentConfig::parse(
      "top = 1\n"
      "# comment\n"
      "[grid]\n"
      "  n = 3   ; trailing\n"
      "L=16\n"
      "\n"
      "[ solver ]\n"
      "pairs = 2:6, 8/3:4\n");
  CHECK(cfg.get_int("", "top", 0) == 1);
  CHECK(cfg.get_int("grid", "n", 0) == 3);
  CHECK(cfg.get_double("grid", "L", 0) == 16.0);
  CHECK(cfg.get_string("solver", "pairs", "") == "2:6, 8/3:4");
  CHECK(cfg.get_double("grid", "missing", 2.5) == 2.5);
  CHECK_FALSE(cfg.has("grid", "N"));
}

TEST_CASE("typed getters reject malformed values") {
  const auto cfg = ExperimentConfig::parse("[a]\nx = 1.5\ny = abc\nz = 3/4\nw = 1, 2.5, -3\ne = inf\n");
  CHECK(kind_of([&] { cfg.get_int("a", "x", 0); }) == ErrorKind::Usage);
  CHECK(kind_of([&] { cfg.get_double("a", "y", 0); }) == ErrorKind::Usage);
  CHECK(kind_of([&] { cfg.get_exponent("a", "y", ExtExponent(2)); }) == ErrorKind::Usage);
  CHECK(cfg.get_rational("a", "z") == make_rational(3, 4));
  CHECK(cfg.get_list("a", "w") == std::vector<double>{1.0, 2.5, -3.0});
  CHECK(cfg.get_exponent("a", "e", ExtExponent(2)).is_infinite());
  CHECK(kind_of([] { ExperimentConfig::parse("[open\n"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { ExperimentConfig::parse("novalue\n"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { ExperimentConfig::load("/nonexistent/strz.ini"); }) == ErrorKind::Io);
}

TEST_CASE("merge overrides entries") {
  auto base = ExperimentConfig::parse("[g]\nn = 2\nL = 8\n");
  base.merge(ExperimentConfig::parse("[g]\nn = 3\n[h]\nk = v\n"));
  CHECK(base.get_int("g", "n", 0) == 3);
  CHECK(base.get_double("g", "L", 0) == 8.0);
  CHECK(base.get_string("h", "k", "") == "v");
}

TEST_CASE("property: serialization round-trips and is idempotent") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    ExperimentConfig cfg;
    const int sections = 1 + static_cast<int>(rng() % 4);
    for (int s = 0; s < sections; ++s) {
      const std::string name = s == 0 && rng() % 3 == 0 ? "" : random_token(rng, false);
      const int keys = 1 + static_cast<int>(rng() % 5);
      for (int k = 0; k < keys; ++k) cfg.set(name, random_token(rng, false), random_token(rng, true));
    }
    const std::string text = cfg.serialize();
    const auto back = ExperimentConfig::parse(text);
    REQUIRE(back.sections() == cfg.sections());
    REQUIRE(back.serialize() == text);
    REQUIRE(back.hash() == cfg.hash());
  }
}

TEST_CASE("hash distinguishes configs and ignores layout") {
  const auto a = ExperimentConfig::parse("[g]\nn = 2\nL = 8\n");
  const auto b = ExperimentConfig::parse("[g]\n  L = 8   # box\nn=2\n");
  const auto c = ExperimentConfig::parse("[g]\nn = 3\nL = 8\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("potential config round trip") {
  PotentialConfig pc;
  pc.kind = "modulated";
  pc.amplitude = -2.5;
  pc.width = 0.75;
  pc.r = ExtExponent(8, 3);
  pc.s = ExtExponent::infinity();
  pc.schedule = "local";
  pc.alpha = make_rational(7, 5);
  pc.beta = make_rational(3, 2);
  pc.K = 42;
  pc.delta = 0.125;
  pc.total_time = 3.0;
  pc.knots = {0.0, 0.5, 1.0};
  pc.amplitudes = {1.0, -0.1, 1e-7};
  ExperimentConfig cfg;
  write_potential_config(cfg, pc, "pot");
  const auto back = read_potential_config(ExperimentConfig::parse(cfg.serialize()), "pot");
  CHECK(back.kind == pc.kind);
  CHECK(back.amplitude == pc.amplitude);
  CHECK(back.width == pc.width);
  CHECK(back.r == pc.r);
  CHECK(back.s == pc.s);
  CHECK(back.schedule == pc.schedule);
  CHECK(back.alpha == pc.alpha);
  CHECK(back.beta == pc.beta);
  CHECK(back.K == pc.K);
  CHECK(back.delta == pc.delta);
  CHECK(back.total_time == pc.total_time);
  CHECK(back.knots == pc.knots);
  CHECK(back.amplitudes == pc.amplitudes);
}

TEST_CASE("building potentials from configs") {
  const Grid g(3, 8.0, 16);
  PotentialConfig pc;
  pc.kind = "static";
  CHECK(std::string(build_potential(pc, g).kind_name()) == "static");
  const auto profile = resolve_profile(pc, g);
  CHECK(lq_norm(profile - gaussian_weight(g, -1.0, 1.0), 2.0) == 0.0);

  pc.kind = "patched";
  pc.r = ExtExponent(1);
  pc.s = ExtExponent(2);
  pc.schedule = "global-supercritical";
  pc.K = 5;
  const auto V = build_potential(pc, g);
  CHECK(std::string(V.kind_name()) == "patched");

  pc.kind = "bogus";
  CHECK(kind_of([&] { build_potential(pc, g); }) == ErrorKind::Usage);

  const auto path = std::filesystem::temp_directory_path() / "strz_test_profile.bin";
  save_snapshot(path, gaussian_weight(g, 2.0));
  PotentialConfig snap;
  snap.kind = "static";
  snap.profile = path.string();
  CHECK(lq_norm(resolve_profile(snap, g) - gaussian_weight(g, 2.0), 2.0) == 0.0);
  std::filesystem::remove(path);
}
