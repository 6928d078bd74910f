#include <doctest.h>

#include "strz/error.hpp"
#include "strz/exponents.hpp"

#include <random>

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

// Reciprocal exponents with small denominators in [lo, hi].
struct ReciprocalGen {
  std::mt19937_64 rng;
  Rational operator()(const Rational& lo, const Rational& hi) {
    for (;;) {
      const long long den = std::uniform_int_distribution<long long>(1, 24)(rng);
      const long long num = std::uniform_int_distribution<long long>(0, den)(rng);
      const Rational v(num, den);
      if (v >= lo && v <= hi) return v;
    }
  }
};

Rational rho_of(const Rational& inv_r, const Rational& inv_s, int n) { return inv_r + Rational(n, 2) * inv_s; }

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("-3/2") == make_rational(-3, 2));
  CHECK(parse_rational("0.25") == make_rational(1, 4));
  CHECK(parse_rational("1e-3") == make_rational(1, 1000));
  CHECK(parse_rational("0.08") == make_rational(2, 25));
  CHECK(parse_rational("010/07") == make_rational(10, 7));
  CHECK(parse_rational("1e05") == 100000);
  CHECK(parse_rational("12345678901234567890") == Rational(boost::multiprecision::cpp_int("12345678901234567890")));
  CHECK(kind_of([] { parse_rational("x"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { parse_rational("1/0"); }) == ErrorKind::Usage);
}

TEST_CASE("extended exponents") {
  CHECK(ExtExponent::parse("inf").is_infinite());
  CHECK(ExtExponent::parse("∞").is_infinite());
  CHECK(ExtExponent::parse("8/3") == E(8, 3));
  CHECK(E(8, 3).str() == "8/3");
  CHECK(Inf.str() == "inf");
  CHECK(Inf.reciprocal() == 0);
  CHECK(E(2) < Inf);
  CHECK(ExtExponent::from_reciprocal(0).is_infinite());
  CHECK(kind_of([] { ExtExponent(1, 2); }) == ErrorKind::Precondition);
  CHECK(kind_of([] { ExtExponent::from_reciprocal(2); }) == ErrorKind::Precondition);
}

TEST_CASE("admissibility worked examples") {
  CHECK(is_admissible(Inf, E(2), 3));
  CHECK(is_admissible(E(2), E(6), 3));
  CHECK_FALSE(is_admissible(E(2), Inf, 2));
  CHECK(is_admissible(E(4), E(3), 3));
  CHECK(is_admissible(E(4), E(4), 2));
  CHECK_FALSE(is_admissible(E(1), E(2), 3));
  CHECK_FALSE(is_admissible(E(3), E(3), 3));
  CHECK(kind_of([] { is_admissible(E(2), E(2), 1); }) == ErrorKind::DimensionOutOfRange);
}

TEST_CASE("duals") {
  CHECK(dual(E(2)) == E(2));
  CHECK(dual(Inf) == E(1));
  CHECK(dual(E(1)) == Inf);
  CHECK(dual(E(6)) == E(6, 5));
}

TEST_CASE("classification and scaling") {
  CHECK(classify_potential(E(2), E(3), 3).criticality == Criticality::Critical);
  CHECK(classify_potential(E(4), E(6), 3).criticality == Criticality::Subcritical);
  CHECK(classify_potential(E(1), E(2), 3).criticality == Criticality::Supercritical);
  CHECK(classify_potential(Inf, E(3, 2), 3).criticality == Criticality::Critical);
  CHECK(scaling_exponent(E(2), E(3), 3) == 0);
  CHECK(scaling_exponent(Inf, Inf, 3) == 2);
  CHECK(scaling_exponent(E(1), E(2), 3) == make_rational(-3, 2));
}

TEST_CASE("critical splits") {
  const auto a = holder_split_case_a(E(2), E(3), 3);
  CHECK(a.p == Inf);
  CHECK(a.q == E(2));
  const auto b = holder_split_case_a(E(4), E(2), 3);
  CHECK(b.p == E(4));
  CHECK(b.q == E(3));
  CHECK(kind_of([] { holder_split_case_a(E(4), E(6), 3); }) == ErrorKind::Precondition);

  const auto d = dual_pair_case_b(E(2), E(3), 3);
  CHECK(d.admissible.p == E(2));
  CHECK(d.admissible.q == E(6));
  CHECK(d.dual_q == E(6, 5));
  const auto e = dual_pair_case_b(E(1), Inf, 3);
  CHECK(e.admissible.p == Inf);
  CHECK(e.admissible.q == E(2));
  CHECK(kind_of([] { dual_pair_case_b(E(2), E(2), 2); }) == ErrorKind::Precondition);
}

TEST_CASE("schedule parameters") {
  const auto sub = global_subcritical_params(E(4), E(6), 3);
  CHECK(sub.kind == ScheduleKind::GlobalSubcritical);
  CHECK(satisfies_invariant(sub, E(4), E(6), 3));
  CHECK(satisfies_invariant(local_params(E(1), E(2), 3), E(1), E(2), 3));
  CHECK(satisfies_invariant({make_rational(7, 5), make_rational(3, 2), ScheduleKind::Local}, E(1), E(2), 3));
  CHECK_FALSE(satisfies_invariant({2, 2, ScheduleKind::Local}, E(1), E(2), 3));
  CHECK(kind_of([] { global_subcritical_params(E(2), E(3), 3); }) == ErrorKind::WrongRegime);
  CHECK(kind_of([] { supercritical_params(E(4), E(6), 3, ScheduleKind::GlobalSupercritical); }) ==
        ErrorKind::WrongRegime);
  CHECK(parse_schedule_kind("global-subcritical") == ScheduleKind::GlobalSubcritical);
  CHECK(parse_schedule_kind("local") == ScheduleKind::Local);
  CHECK_FALSE(parse_schedule_kind("sideways").has_value());
}

TEST_CASE("pseudoconformal condition") {
  CHECK(pseudoconformal_ok(E(1), E(2), 3));
  CHECK_FALSE(pseudoconformal_ok(E(2), E(3, 2), 2));
  CHECK(kind_of([] { pseudoconformal_ok(E(2), E(3), 3); }) == ErrorKind::Precondition);
}

TEST_CASE("property: Hölder splits of critical classes are admissible") {
  ReciprocalGen gen{std::mt19937_64(11)};
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + i % 2;
    const Rational inv_r = gen(0, Rational(1, 2));
    if (inv_r == 0) continue;
    const Rational inv_s = 2 * (1 - inv_r) / n;
    const auto split = holder_split_case_a(ExtExponent::from_reciprocal(inv_r), ExtExponent::from_reciprocal(inv_s), n);
    // Independent check of 1/p + n/(2q) = n/4 and the Hölder relation.
    const Rational ip = split.p.reciprocal(), iq = split.q.reciprocal();
    REQUIRE(ip + Rational(n, 2) * iq == Rational(n, 4));
    REQUIRE(ip == Rational(1, 2) - inv_r);
    REQUIRE(is_admissible(split));
  }
}

TEST_CASE("property: dual involution") {
  ReciprocalGen gen{std::mt19937_64(12)};
  for (int i = 0; i < 1000; ++i) {
    const auto e = ExtExponent::from_reciprocal(gen(0, 1));
    REQUIRE(dual(dual(e)) == e);
    REQUIRE(e.reciprocal() + dual(e).reciprocal() == 1);
  }
}

TEST_CASE("property: criticality matches vanishing scaling exponent") {
  ReciprocalGen gen{std::mt19937_64(13)};
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + i % 2;
    const Rational inv_r = gen(0, 1);
    Rational inv_s = gen(0, 1);
    if (i % 4 == 0 && 2 * (1 - inv_r) / n <= 1) inv_s = 2 * (1 - inv_r) / n;
    const auto r = ExtExponent::from_reciprocal(inv_r), s = ExtExponent::from_reciprocal(inv_s);
    const Rational rho = rho_of(inv_r, inv_s, n);
    REQUIRE(scaling_exponent(r, s, n) == 2 * (1 - rho));
    const auto c = classify_potential(r, s, n).criticality;
    REQUIRE((c == Criticality::Critical) == (rho == 1));
    REQUIRE((c == Criticality::Subcritical) == (rho < 1));
  }
}

TEST_CASE("property: the two pseudoconformal conditions agree") {
  ReciprocalGen gen{std::mt19937_64(14)};
  int checked = 0;
  for (int i = 0; i < 2000 && checked < 1000; ++i) {
    const int n = 2 + i % 2;
    const Rational inv_r = gen(Rational(1, 24), 1);
    const Rational inv_s = gen(Rational(1, n), Rational(2, n));
    if (inv_s == Rational(1, n) || inv_s == Rational(2, n)) continue;
    const auto pc = pseudoconformal_conditions(ExtExponent::from_reciprocal(inv_r), ExtExponent::from_reciprocal(inv_s), n);
    REQUIRE(pc.holder_form == pc.integrability_form);
    // r (n/s - 2) > -1 evaluated directly.
    REQUIRE(pc.integrability_form == ((n * inv_s - 2) / inv_r > -1));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("property: selectors satisfy their invariants") {
  ReciprocalGen gen{std::mt19937_64(15)};
  for (int i = 0; i < 500; ++i) {
    const int n = 2 + i % 2;
    const Rational inv_r = gen(Rational(1, 24), 1);
    const Rational inv_s = gen(0, 1);
    const auto r = ExtExponent::from_reciprocal(inv_r), s = ExtExponent::from_reciprocal(inv_s);
    const Rational rho = rho_of(inv_r, inv_s, n);
    if (rho < 1) {
      const auto p = global_subcritical_params(r, s, n);
      REQUIRE(satisfies_invariant(p, r, s, n));
      REQUIRE(p.alpha > p.beta);
      REQUIRE(p.beta > 1 / (1 - rho));
    } else if (rho > 1) {
      const auto p = supercritical_params(r, s, n, ScheduleKind::GlobalSupercritical);
      REQUIRE(satisfies_invariant(p, r, s, n));
      REQUIRE(p.alpha < p.beta);
      const auto l = local_params(r, s, n);
      REQUIRE(satisfies_invariant(l, r, s, n));
      REQUIRE(l.alpha > 1);
    }
  }
}
