#pragma once

// Exact arithmetic over Lebesgue exponents in [1, ∞].
//
// Every exponent is either a rational number >= 1 or Infinity. Conditions
// such as admissibility are exact identities, so everything here stays in
// rational arithmetic and never touches floating point until to_double().

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace strz {

using Rational = boost::multiprecision::cpp_rational;

Rational make_rational(long long num, long long den = 1);
double to_double(const Rational& r);
std::string to_string(const Rational& r);

/// Parses "3", "-3/2", "0.25" or "1e-3" exactly. Throws Error(Usage).
Rational parse_rational(std::string_view text);

class ExtExponent {
 public:
  /// Finite exponent; throws Error(Precondition) if value < 1.
  explicit ExtExponent(Rational value);
  ExtExponent(long long num, long long den = 1);

  static ExtExponent infinity();
  /// Builds the exponent e with 1/e = inv; inv must lie in [0, 1].
  static ExtExponent from_reciprocal(const Rational& inv);
  /// Accepts "inf", "infinity", "∞" and anything parse_rational accepts.
  static ExtExponent parse(std::string_view text);

  bool is_infinite() const noexcept { return infinite_; }
  /// Finite value; throws Error(Precondition) on Infinity.
  const Rational& value() const;
  /// 1/e with 1/∞ = 0.
  Rational reciprocal() const;
  /// +inf for Infinity.
  double to_double() const;
  std::string str() const;

  friend bool operator==(const ExtExponent& a, const ExtExponent& b);
  friend std::strong_ordering operator<=>(const ExtExponent& a, const ExtExponent& b);

 private:
  ExtExponent() = default;
  bool infinite_ = false;
  Rational value_{1};
};

/// Conjugate exponent: 1/e + 1/e' = 1.
ExtExponent dual(const ExtExponent& e);

struct ExponentPair {
  ExtExponent p;
  ExtExponent q;
  int n;
};

/// 1/p + n/(2q) = n/4, p, q in [2, ∞] and (n, p, q) != (2, 2, ∞).
/// Throws Error(DimensionOutOfRange) when n < 2.
bool is_admissible(const ExtExponent& p, const ExtExponent& q, int n);
inline bool is_admissible(const ExponentPair& pq) { return is_admissible(pq.p, pq.q, pq.n); }

/// The Strichartz gap n/2 - n/q, equal to 2/p on admissible pairs.
Rational strichartz_gap(const ExtExponent& q, int n);

enum class Criticality { Subcritical, Critical, Supercritical };
const char* to_string(Criticality c);

struct PotentialClass {
  ExtExponent r;
  ExtExponent s;
  int n;
  Rational rho;  // 1/r + n/(2s)
  Criticality criticality;
};

PotentialClass classify_potential(const ExtExponent& r, const ExtExponent& s, int n);

/// 2 (1 - 1/r - n/(2s)): the power of ε picked up by ‖ε²V(ε²t, εx)‖_{L^r L^s}.
Rational scaling_exponent(const ExtExponent& r, const ExtExponent& s, int n);

/// Hölder split for critical (r, s) with r in [2, ∞):
///   1/p₀ = 1/2 - 1/r,  1/q₀ = (n+2)/(2n) - 1/s.
ExponentPair holder_split_case_a(const ExtExponent& r, const ExtExponent& s, int n);

struct DualPairSplit {
  ExponentPair admissible;  // (r', 2s/(s-2))
  ExtExponent dual_p;       // r
  ExtExponent dual_q;       // 2s/(s+2)
};

/// Dual-pair split for critical (r, s) with r in [1, 2].
DualPairSplit dual_pair_case_b(const ExtExponent& r, const ExtExponent& s, int n);

enum class ScheduleKind { GlobalSubcritical, GlobalSupercritical, Local };
const char* to_string(ScheduleKind kind);
std::optional<ScheduleKind> parse_schedule_kind(std::string_view text);

struct ScheduleParams {
  Rational alpha;
  Rational beta;
  ScheduleKind kind;
};

/// Default headroom used by the selectors.
Rational default_headroom();

/// Checks the strict inequalities that make the cascade's potential norm
/// summable while the Strichartz ratio diverges:
///   GlobalSubcritical:   α > β > 1/(1-ρ),  (α-β)/r + βρ < β - 1
///   GlobalSupercritical: β > 1/(ρ-1), α < β, (α-β)/r + βρ > β + 1
///   Local:               as GlobalSupercritical, plus α > 1
bool satisfies_invariant(const ScheduleParams& params, const ExtExponent& r,
                         const ExtExponent& s, int n);

/// β = (1+h)/(1-ρ); α = β(1+g) with g halved from h until the norm
/// inequality holds. Throws Error(WrongRegime) unless subcritical with r < ∞.
ScheduleParams global_subcritical_params(const ExtExponent& r, const ExtExponent& s, int n,
                                         const Rational& headroom = default_headroom());

/// β = (1+h)/(ρ-1) (raised to 1+2h if it does not exceed 1+h); α = β(1-g)
/// with g halved from h until the inequality (and α > 1 for Local) holds.
ScheduleParams supercritical_params(const ExtExponent& r, const ExtExponent& s, int n,
                                    ScheduleKind kind,
                                    const Rational& headroom = default_headroom());

inline ScheduleParams local_params(const ExtExponent& r, const ExtExponent& s, int n,
                                   const Rational& headroom = default_headroom()) {
  return supercritical_params(r, s, n, ScheduleKind::Local, headroom);
}

struct PseudoconformalConditions {
  bool holder_form;         // 1/(2r) + n/(2s) > 1
  bool integrability_form;  // r (n/s - 2) > -1
};

/// Both formulations of the pseudoconformal index condition. Requires
/// r in [1, ∞) and s in (n/2, n); otherwise Error(Precondition).
PseudoconformalConditions pseudoconformal_conditions(const ExtExponent& r,
                                                     const ExtExponent& s, int n);

bool pseudoconformal_ok(const ExtExponent& r, const ExtExponent& s, int n);

}  // namespace strz
