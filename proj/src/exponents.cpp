#include "strz/exponents.hpp"

#include "strz/error.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace strz {

namespace {

constexpr int kMaxHalvings = 200;

bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// cpp_int reads a leading 0 as an octal prefix.
std::string decimal_digits(std::string_view s) {
  const auto first = s.find_first_not_of('0');
  return first == std::string_view::npos ? std::string("0") : std::string(s.substr(first));
}

boost::multiprecision::cpp_int parse_integer(std::string_view s, std::string_view whole) {
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  if (!is_digits(s)) fail(ErrorKind::Usage, "malformed rational '" + std::string(whole) + "'");
  boost::multiprecision::cpp_int v{decimal_digits(s)};
  if (neg) v = -v;
  return v;
}

boost::multiprecision::cpp_int pow10(long e) {
  boost::multiprecision::cpp_int v = 1;
  for (long i = 0; i < e; ++i) v *= 10;
  return v;
}

void check_dimension(int n) {
  if (n < 2) fail(ErrorKind::DimensionOutOfRange, "dimension n = " + std::to_string(n) + " < 2");
}

Rational rho_of(const ExtExponent& r, const ExtExponent& s, int n) {
  return r.reciprocal() + Rational(n) * s.reciprocal() / 2;
}

}  // namespace

Rational make_rational(long long num, long long den) { return Rational(num, den); }

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) fail(ErrorKind::Usage, "empty rational");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = parse_integer(s.substr(0, slash), text);
    auto den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) fail(ErrorKind::Usage, "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    auto exp_text = s.substr(e + 1);
    auto v = parse_integer(exp_text, text);
    if (abs(v) > 4000) fail(ErrorKind::Usage, "exponent out of range in '" + std::string(text) + "'");
    exponent = v.convert_to<long>();
    s = s.substr(0, e);
  }
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  std::string digits;
  long frac_len = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto ip = s.substr(0, dot);
    auto fp = s.substr(dot + 1);
    if ((!ip.empty() && !is_digits(ip)) || (!fp.empty() && !is_digits(fp)) || (ip.empty() && fp.empty()))
      fail(ErrorKind::Usage, "malformed rational '" + std::string(text) + "'");
    digits = std::string(ip) + std::string(fp);
    frac_len = static_cast<long>(fp.size());
  } else {
    if (!is_digits(s)) fail(ErrorKind::Usage, "malformed rational '" + std::string(text) + "'");
    digits = std::string(s);
  }
  boost::multiprecision::cpp_int mant(decimal_digits(digits));
  if (neg) mant = -mant;
  long shift = exponent - frac_len;
  if (shift >= 0) return Rational(mant * pow10(shift));
  return Rational(mant, pow10(-shift));
}

// --- ExtExponent -----------------------------------------------------------

ExtExponent::ExtExponent(Rational value) : value_(std::move(value)) {
  if (value_ < 1) fail(ErrorKind::Precondition, "Lebesgue exponent " + to_string(value_) + " < 1");
}

ExtExponent::ExtExponent(long long num, long long den) : ExtExponent(Rational(num, den)) {}

ExtExponent ExtExponent::infinity() {
  ExtExponent e;
  e.infinite_ = true;
  e.value_ = 0;
  return e;
}

ExtExponent ExtExponent::from_reciprocal(const Rational& inv) {
  if (inv < 0 || inv > 1)
    fail(ErrorKind::Precondition, "reciprocal exponent " + to_string(inv) + " outside [0, 1]");
  if (inv == 0) return infinity();
  return ExtExponent(Rational(1) / inv);
}

ExtExponent ExtExponent::parse(std::string_view text) {
  std::string t(text);
  for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "inf" || t == "infinity" || t == "∞" || t == "+inf") return infinity();
  return ExtExponent(parse_rational(text));
}

const Rational& ExtExponent::value() const {
  if (infinite_) fail(ErrorKind::Precondition, "value() of an infinite exponent");
  return value_;
}

Rational ExtExponent::reciprocal() const {
  if (infinite_) return Rational(0);
  return Rational(1) / value_;
}

double ExtExponent::to_double() const {
  if (infinite_) return std::numeric_limits<double>::infinity();
  return strz::to_double(value_);
}

std::string ExtExponent::str() const { return infinite_ ? "inf" : to_string(value_); }

bool operator==(const ExtExponent& a, const ExtExponent& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

std::strong_ordering operator<=>(const ExtExponent& a, const ExtExponent& b) {
  if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
  if (a.infinite_) return std::strong_ordering::greater;
  if (b.infinite_) return std::strong_ordering::less;
  if (a.value_ < b.value_) return std::strong_ordering::less;
  if (a.value_ > b.value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

ExtExponent dual(const ExtExponent& e) { return ExtExponent::from_reciprocal(1 - e.reciprocal()); }

// --- admissibility ---------------------------------------------------------

bool is_admissible(const ExtExponent& p, const ExtExponent& q, int n) {
  check_dimension(n);
  const ExtExponent two(2);
  if (p < two || q < two) return false;
  if (n == 2 && p == two && q.is_infinite()) return false;
  return p.reciprocal() + Rational(n) * q.reciprocal() / 2 == Rational(n, 4);
}

Rational strichartz_gap(const ExtExponent& q, int n) {
  return Rational(n, 2) - Rational(n) * q.reciprocal();
}

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::Subcritical: return "subcritical";
    case Criticality::Critical: return "critical";
    case Criticality::Supercritical: return "supercritical";
  }
  return "?";
}

PotentialClass classify_potential(const ExtExponent& r, const ExtExponent& s, int n) {
  check_dimension(n);
  Rational rho = rho_of(r, s, n);
  Criticality c = rho < 1 ? Criticality::Subcritical
                          : (rho == 1 ? Criticality::Critical : Criticality::Supercritical);
  return PotentialClass{r, s, n, rho, c};
}

Rational scaling_exponent(const ExtExponent& r, const ExtExponent& s, int n) {
  check_dimension(n);
  return 2 * (1 - rho_of(r, s, n));
}

ExponentPair holder_split_case_a(const ExtExponent& r, const ExtExponent& s, int n) {
  auto cls = classify_potential(r, s, n);
  if (cls.criticality != Criticality::Critical)
    fail(ErrorKind::Precondition, "holder split needs a critical (r, s); got rho = " + to_string(cls.rho));
  if (r < ExtExponent(2) || r.is_infinite())
    fail(ErrorKind::Precondition, "holder split needs r in [2, inf); got r = " + r.str());
  auto p0 = ExtExponent::from_reciprocal(Rational(1, 2) - r.reciprocal());
  auto q0 = ExtExponent::from_reciprocal(Rational(n + 2, 2 * n) - s.reciprocal());
  ExponentPair out{p0, q0, n};
  if (!is_admissible(out))
    fail(ErrorKind::Precondition, "holder split produced a non-admissible pair (" + p0.str() + ", " + q0.str() + ")");
  return out;
}

DualPairSplit dual_pair_case_b(const ExtExponent& r, const ExtExponent& s, int n) {
  auto cls = classify_potential(r, s, n);
  if (cls.criticality != Criticality::Critical)
    fail(ErrorKind::Precondition, "dual pair split needs a critical (r, s); got rho = " + to_string(cls.rho));
  if (r < ExtExponent(1) || r > ExtExponent(2))
    fail(ErrorKind::Precondition, "dual pair split needs r in [1, 2]; got r = " + r.str());
  // 2s/(s-2) and 2s/(s+2) in reciprocal form: 1/2 -+ 1/s.
  ExponentPair adm{dual(r), ExtExponent::from_reciprocal(Rational(1, 2) - s.reciprocal()), n};
  if (!is_admissible(adm))
    fail(ErrorKind::Precondition, "dual pair (" + adm.p.str() + ", " + adm.q.str() +
                                      ") is not admissible in n = " + std::to_string(n));
  DualPairSplit out{adm, r, ExtExponent::from_reciprocal(Rational(1, 2) + s.reciprocal())};
  return out;
}

// --- schedule parameters ---------------------------------------------------

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::GlobalSubcritical: return "global_subcritical";
    case ScheduleKind::GlobalSupercritical: return "global_supercritical";
    case ScheduleKind::Local: return "local";
  }
  return "?";
}

std::optional<ScheduleKind> parse_schedule_kind(std::string_view text) {
  std::string t(text);
  std::replace(t.begin(), t.end(), '-', '_');
  if (t == "global_subcritical" || t == "subcritical") return ScheduleKind::GlobalSubcritical;
  if (t == "global_supercritical" || t == "supercritical") return ScheduleKind::GlobalSupercritical;
  if (t == "local") return ScheduleKind::Local;
  return std::nullopt;
}

Rational default_headroom() { return Rational(1, 10); }

bool satisfies_invariant(const ScheduleParams& prm, const ExtExponent& r, const ExtExponent& s, int n) {
  if (r.is_infinite() || prm.alpha <= 0 || prm.beta <= 0) return false;
  const Rational rho = rho_of(r, s, n);
  const Rational lhs = (prm.alpha - prm.beta) * r.reciprocal() + prm.beta * rho;
  switch (prm.kind) {
    case ScheduleKind::GlobalSubcritical:
      if (rho >= 1) return false;
      return prm.beta * (1 - rho) > 1 && prm.alpha > prm.beta && lhs < prm.beta - 1;
    case ScheduleKind::GlobalSupercritical:
    case ScheduleKind::Local:
      if (rho <= 1) return false;
      if (!(prm.beta * (rho - 1) > 1 && prm.alpha < prm.beta && lhs > prm.beta + 1)) return false;
      return prm.kind == ScheduleKind::GlobalSupercritical || prm.alpha > 1;
  }
  return false;
}

ScheduleParams global_subcritical_params(const ExtExponent& r, const ExtExponent& s, int n,
                                         const Rational& headroom) {
  auto cls = classify_potential(r, s, n);
  if (cls.criticality != Criticality::Subcritical)
    fail(ErrorKind::WrongRegime, std::string("global subcritical schedule needs rho < 1; (r, s) is ") +
                                     to_string(cls.criticality));
  if (r.is_infinite()) fail(ErrorKind::WrongRegime, "global subcritical schedule needs r < inf");
  if (headroom <= 0) fail(ErrorKind::Precondition, "headroom must be positive");

  ScheduleParams prm{0, (1 + headroom) / (1 - cls.rho), ScheduleKind::GlobalSubcritical};
  Rational gap = headroom;
  for (int i = 0; i < kMaxHalvings; ++i, gap /= 2) {
    prm.alpha = prm.beta * (1 + gap);
    if (satisfies_invariant(prm, r, s, n)) return prm;
  }
  fail(ErrorKind::WrongRegime, "no admissible alpha found for the subcritical schedule");
}

ScheduleParams supercritical_params(const ExtExponent& r, const ExtExponent& s, int n, ScheduleKind kind,
                                    const Rational& headroom) {
  if (kind == ScheduleKind::GlobalSubcritical)
    fail(ErrorKind::WrongRegime, "supercritical selector called with a subcritical kind");
  auto cls = classify_potential(r, s, n);
  if (cls.criticality != Criticality::Supercritical)
    fail(ErrorKind::WrongRegime, std::string("supercritical schedule needs rho > 1; (r, s) is ") +
                                     to_string(cls.criticality));
  if (r.is_infinite()) fail(ErrorKind::WrongRegime, "supercritical schedule needs r < inf");
  if (headroom <= 0) fail(ErrorKind::Precondition, "headroom must be positive");

  ScheduleParams prm{0, (1 + headroom) / (cls.rho - 1), kind};
  if (prm.beta <= 1 + headroom) prm.beta = 1 + 2 * headroom;
  Rational gap = headroom;
  for (int i = 0; i < kMaxHalvings; ++i, gap /= 2) {
    if (gap >= 1) continue;
    prm.alpha = prm.beta * (1 - gap);
    if (satisfies_invariant(prm, r, s, n)) return prm;
  }
  fail(ErrorKind::WrongRegime, "no admissible alpha found for the supercritical schedule");
}

PseudoconformalConditions pseudoconformal_conditions(const ExtExponent& r, const ExtExponent& s, int n) {
  check_dimension(n);
  if (r.is_infinite()) fail(ErrorKind::Precondition, "pseudoconformal condition needs r < inf");
  if (s.is_infinite() || !(2 * s.value() > n) || !(s.value() < n))
    fail(ErrorKind::Precondition, "pseudoconformal condition needs s in (n/2, n); got s = " + s.str());
  const Rational& rv = r.value();
  const Rational& sv = s.value();
  PseudoconformalConditions c;
  c.holder_form = Rational(1) / (2 * rv) + Rational(n) / (2 * sv) > 1;
  c.integrability_form = rv * (Rational(n) / sv - 2) > -1;
  return c;
}

bool pseudoconformal_ok(const ExtExponent& r, const ExtExponent& s, int n) {
  auto c = pseudoconformal_conditions(r, s, n);
  if (c.holder_form != c.integrability_form)
    throw std::logic_error("pseudoconformal conditions disagree");
  return c.holder_form;
}

}  // namespace strz
