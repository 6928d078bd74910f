#include "strz/potentials.hpp"

#include "strz/error.hpp"
#include "strz/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace strz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_real(const ComplexField& profile, const char* what) {
  if (!profile.is_real()) fail(ErrorKind::Precondition, std::string(what) + ": potential profile must be real-valued");
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

// --- schedules -------------------------------------------------------------

std::optional<std::size_t> Schedule::window_at(double t, Side side) const {
  if (windows.empty()) return std::nullopt;
  auto starts_before = [&](const Window& w, double v) { return side == Side::Right ? w.start <= v : w.start < v; };
  // first window whose start is not before t
  auto it = std::partition_point(windows.begin(), windows.end(), [&](const Window& w) { return starts_before(w, t); });
  if (it == windows.begin()) return std::nullopt;
  --it;
  const bool inside = side == Side::Right ? t < it->end() : t <= it->end();
  if (!inside) return std::nullopt;
  return static_cast<std::size_t>(it - windows.begin());
}

double zeta(double a) {
  if (!(a > 1)) fail(ErrorKind::Precondition, "zeta needs a > 1");
  const int m = 1000;
  double s = 0.0;
  for (int k = m - 1; k >= 1; --k) s += std::pow(k, -a);
  const double mm = m;
  s += std::pow(mm, 1 - a) / (a - 1) + 0.5 * std::pow(mm, -a) + a / 12.0 * std::pow(mm, -a - 1) -
       a * (a + 1) * (a + 2) / 720.0 * std::pow(mm, -a - 3);
  return s;
}

Schedule make_schedule(const ScheduleParams& params, int windows, std::optional<double> local_total) {
  if (windows < 1) fail(ErrorKind::Precondition, "a schedule needs at least one window");
  const double alpha = to_double(params.alpha);
  const double beta = to_double(params.beta);
  Schedule sch{params, 1.0, {}};
  sch.windows.reserve(windows);
  switch (params.kind) {
    case ScheduleKind::GlobalSubcritical: {
      double start = 0.0;
      for (int k = 1; k <= windows; ++k) {
        const double len = std::pow(k, alpha);
        sch.windows.push_back({start, len, std::pow(k, -beta / 2)});
        start += len;
      }
      break;
    }
    case ScheduleKind::GlobalSupercritical:
      for (int k = 1; k <= windows; ++k) sch.windows.push_back({double(k), std::pow(k, -alpha), std::pow(k, beta / 2)});
      break;
    case ScheduleKind::Local: {
      if (!(alpha > 1)) fail(ErrorKind::WrongRegime, "local schedule needs alpha > 1 for a finite total time");
      if (local_total) {
        if (!(*local_total > 0)) fail(ErrorKind::Precondition, "local total time must be positive");
        sch.length_scale = *local_total / zeta(alpha);
      }
      double start = 0.0;
      for (int k = 1; k <= windows; ++k) {
        const double len = sch.length_scale * std::pow(k, -alpha);
        sch.windows.push_back({start, len, std::pow(k, beta / 2)});
        start += len;
      }
      break;
    }
  }
  return sch;
}

// --- PotentialSpec ---------------------------------------------------------

double Modulated::amplitude(double t, Side side) const {
  if (knots.empty()) return 0.0;
  if (t < knots.front() || (side == Side::Left && t == knots.front())) return amplitudes.front();
  if (t > knots.back() || (side == Side::Right && t == knots.back())) return amplitudes.back();
  if (interpolation == Interpolation::Step) {
    auto it = side == Side::Right ? std::upper_bound(knots.begin(), knots.end(), t)
                                  : std::lower_bound(knots.begin(), knots.end(), t);
    const auto idx = static_cast<std::size_t>(it - knots.begin()) - 1;
    return amplitudes[idx];
  }
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  const auto hi = static_cast<std::size_t>(it - knots.begin());
  const auto lo = hi - 1;
  if (hi >= knots.size()) return amplitudes.back();
  const double w = (t - knots[lo]) / (knots[hi] - knots[lo]);
  return (1 - w) * amplitudes[lo] + w * amplitudes[hi];
}

PotentialSpec PotentialSpec::static_profile(ComplexField profile) {
  require_real(profile, "static");
  return PotentialSpec(StaticPotential{std::move(profile)});
}

PotentialSpec PotentialSpec::patched(ComplexField profile, Schedule schedule) {
  require_real(profile, "patched");
  for (std::size_t i = 1; i < schedule.windows.size(); ++i)
    if (!(schedule.windows[i].start >= schedule.windows[i - 1].end()))
      fail(ErrorKind::Precondition, "patched windows must be disjoint and ordered");
  return PotentialSpec(PatchedRescaled{std::move(profile), std::move(schedule)});
}

PotentialSpec PotentialSpec::pseudoconformal(ComplexField profile) {
  require_real(profile, "pseudoconformal");
  return PotentialSpec(Pseudoconformal{std::move(profile)});
}

PotentialSpec PotentialSpec::modulated(ComplexField profile, std::vector<double> knots, std::vector<double> amplitudes,
                                       Interpolation interpolation) {
  require_real(profile, "modulated");
  if (knots.empty() || knots.size() != amplitudes.size())
    fail(ErrorKind::Precondition, "modulated potential needs matching, non-empty knots and amplitudes");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1])) fail(ErrorKind::Precondition, "modulation knots must increase strictly");
  for (double a : amplitudes)
    if (!std::isfinite(a)) fail(ErrorKind::Precondition, "modulation amplitudes must be finite");
  return PotentialSpec(Modulated{std::move(profile), std::move(knots), std::move(amplitudes), interpolation});
}

PotentialSpec PotentialSpec::sum(std::vector<std::pair<PotentialSpec, std::pair<ExtExponent, ExtExponent>>> terms) {
  SumPotential s;
  for (auto& [spec, rs] : terms)
    s.terms.push_back({std::make_shared<const PotentialSpec>(std::move(spec)), rs.first, rs.second});
  return PotentialSpec(std::move(s));
}

const char* PotentialSpec::kind_name() const noexcept {
  return std::visit(overloaded{[](const ZeroPotential&) { return "zero"; },
                               [](const StaticPotential&) { return "static"; },
                               [](const PatchedRescaled&) { return "patched"; },
                               [](const Pseudoconformal&) { return "pseudoconformal"; },
                               [](const Modulated&) { return "modulated"; },
                               [](const SumPotential&) { return "sum"; }},
                    v_);
}

std::vector<double> PotentialSpec::breakpoints(double a, double b) const {
  std::vector<double> out;
  auto add = [&](double t) {
    if (t > a && t < b) out.push_back(t);
  };
  std::visit(overloaded{[&](const PatchedRescaled& p) {
                          for (const auto& w : p.schedule.windows) {
                            add(w.start);
                            add(w.end());
                          }
                        },
                        [&](const Modulated& m) {
                          for (double t : m.knots) add(t);
                        },
                        [&](const SumPotential& s) {
                          for (const auto& term : s.terms)
                            for (double t : term.spec->breakpoints(a, b)) out.push_back(t);
                        },
                        [](const auto&) {}},
             v_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PotentialSpec rescale_potential(const PotentialSpec& spec, double eps) {
  if (!(eps > 0)) fail(ErrorKind::Precondition, "rescale needs eps > 0");
  const double e2 = eps * eps;
  auto scale_profile = [&](const ComplexField& w) {
    ComplexField out = w.on_grid(w.grid().scaled(1.0 / eps));
    out *= e2;
    return out;
  };
  return std::visit(
      overloaded{[&](const ZeroPotential&) { return PotentialSpec::zero(); },
                 [&](const StaticPotential& p) { return PotentialSpec::static_profile(scale_profile(p.profile)); },
                 [&](const PatchedRescaled& p) {
                   Schedule sch = p.schedule;
                   for (auto& w : sch.windows) {
                     w.start /= e2;
                     w.length /= e2;
                     w.eps *= eps;
                   }
                   return PotentialSpec::patched(p.profile, std::move(sch));
                 },
                 [&](const Pseudoconformal&) -> PotentialSpec {
                   fail(ErrorKind::Precondition, "rescaling a pseudoconformal potential leaves its family");
                 },
                 [&](const Modulated& m) {
                   std::vector<double> knots = m.knots;
                   for (auto& t : knots) t /= e2;
                   return PotentialSpec::modulated(scale_profile(m.profile), std::move(knots), m.amplitudes,
                                                   m.interpolation);
                 },
                 [&](const SumPotential& s) {
                   std::vector<std::pair<PotentialSpec, std::pair<ExtExponent, ExtExponent>>> terms;
                   for (const auto& t : s.terms) terms.push_back({rescale_potential(*t.spec, eps), {t.r, t.s}});
                   return PotentialSpec::sum(std::move(terms));
                 }},
      spec.variant());
}

// --- evaluation ------------------------------------------------------------

PotentialEvaluator::PotentialEvaluator(const PotentialSpec& spec, const Grid& grid) : spec_(spec), grid_(grid) {
  if (const auto* s = std::get_if<SumPotential>(&spec_.variant()))
    for (const auto& term : s->terms) terms_.push_back(std::make_unique<PotentialEvaluator>(*term.spec, grid));
}

const ComplexField& PotentialEvaluator::profile_on_grid(const ComplexField& profile) {
  if (profile.grid() == grid_) return profile;
  if (!profile_cache_) profile_cache_ = resample_scaled(profile, grid_, 1.0);
  return *profile_cache_;
}

const ComplexField& PotentialEvaluator::window_field(const PatchedRescaled& p, std::size_t k) {
  auto it = window_cache_.find(k);
  if (it != window_cache_.end()) return it->second;
  if (window_cache_.size() > 8) window_cache_.clear();
  const double eps = p.schedule.windows[k].eps;
  ComplexField f = resample_scaled(p.profile, grid_, eps);
  f *= eps * eps;
  return window_cache_.emplace(k, std::move(f)).first->second;
}

bool PotentialEvaluator::vanishes_at(double t, Side side) const {
  return std::visit(overloaded{[](const ZeroPotential&) { return true; },
                               [&](const PatchedRescaled& p) { return !p.schedule.window_at(t, side).has_value(); },
                               [&](const Modulated& m) { return m.amplitude(t, side) == 0.0; },
                               [&](const SumPotential&) {
                                 return std::all_of(terms_.begin(), terms_.end(),
                                                    [&](const auto& e) { return e->vanishes_at(t, side); });
                               },
                               [](const auto&) { return false; }},
                    spec_.variant());
}

ComplexField PotentialEvaluator::at(double t, Side side) {
  return std::visit(
      overloaded{[&](const ZeroPotential&) { return ComplexField(grid_); },
                 [&](const StaticPotential& p) { return profile_on_grid(p.profile); },
                 [&](const PatchedRescaled& p) {
                   auto k = p.schedule.window_at(t, side);
                   if (!k) return ComplexField(grid_);
                   return window_field(p, *k);
                 },
                 [&](const Pseudoconformal& p) {
                   if (!(t > 0))
                     fail(ErrorKind::Singularity, "pseudoconformal potential is singular at T = " + std::to_string(t));
                   ComplexField f = resample_scaled(p.profile, grid_, 1.0 / t);
                   f *= 1.0 / (t * t);
                   return f;
                 },
                 [&](const Modulated& m) {
                   ComplexField f = profile_on_grid(m.profile);
                   f *= m.amplitude(t, side);
                   return f;
                 },
                 [&](const SumPotential&) {
                   ComplexField f(grid_);
                   for (auto& e : terms_) f += e->at(t, side);
                   return f;
                 }},
      spec_.variant());
}

double PotentialEvaluator::slice_norm(double t, double s, Side side) {
  auto cached_norm = [&](const ComplexField& profile, std::size_t key) {
    auto k = std::make_pair(s, key);
    if (auto it = norm_cache_.find(k); it != norm_cache_.end()) return it->second;
    const double v = lq_norm(profile, s);
    norm_cache_.emplace(k, v);
    return v;
  };
  constexpr std::size_t kProfileKey = std::numeric_limits<std::size_t>::max();
  return std::visit(
      overloaded{[](const ZeroPotential&) { return 0.0; },
                 [&](const StaticPotential& p) { return cached_norm(p.profile, kProfileKey); },
                 [&](const PatchedRescaled& p) {
                   auto k = p.schedule.window_at(t, side);
                   if (!k) return 0.0;
                   auto key = std::make_pair(s, *k);
                   if (auto it = norm_cache_.find(key); it != norm_cache_.end()) return it->second;
                   const double eps = p.schedule.windows[*k].eps;
                   ComplexField f = p.profile.on_grid(p.profile.grid().scaled(1.0 / eps));
                   f *= eps * eps;
                   const double v = lq_norm(f, s);
                   norm_cache_.emplace(key, v);
                   return v;
                 },
                 [&](const Pseudoconformal& p) {
                   if (!(t > 0))
                     fail(ErrorKind::Singularity, "pseudoconformal potential is singular at T = " + std::to_string(t));
                   ComplexField f = p.profile.on_grid(p.profile.grid().scaled(t));
                   f *= 1.0 / (t * t);
                   return lq_norm(f, s);
                 },
                 [&](const Modulated& m) { return std::abs(m.amplitude(t, side)) * cached_norm(m.profile, kProfileKey); },
                 [&](const SumPotential&) { return lq_norm(at(t, side), s); }},
      spec_.variant());
}

ComplexField evaluate(const PotentialSpec& spec, double t, const Grid& grid, Side side) {
  return PotentialEvaluator(spec, grid).at(t, side);
}

// --- mixed norms -----------------------------------------------------------

namespace {

// Σ over segments of the trapezoid rule for ‖V(t)‖_s^r (or max for r = ∞).
double mixed_norm_power(PotentialEvaluator& ev, const PotentialSpec& spec, double r, double s, TimeInterval iv,
                        double dt) {
  if (!(dt > 0)) fail(ErrorKind::Precondition, "time step must be positive");
  if (!(iv.end >= iv.start)) fail(ErrorKind::Precondition, "time interval must be ordered");
  if (iv.end == iv.start) return 0.0;
  std::vector<double> cuts{iv.start};
  for (double b : spec.breakpoints(iv.start, iv.end)) cuts.push_back(b);
  cuts.push_back(iv.end);
  const bool sup = std::isinf(r);
  double acc = 0.0;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double a = cuts[seg], b = cuts[seg + 1];
    const auto m = std::max<long>(1, static_cast<long>(std::ceil((b - a) / dt - 1e-9)));
    const double h = (b - a) / m;
    for (long i = 0; i <= m; ++i) {
      const double t = i == m ? b : a + i * h;
      const Side side = i == m ? Side::Left : Side::Right;
      const double v = ev.slice_norm(t, s, side);
      if (sup) {
        acc = std::max(acc, v);
      } else {
        const double w = (i == 0 || i == m) ? 0.5 * h : h;
        acc += w * std::pow(v, r);
      }
    }
  }
  return acc;
}

}  // namespace

double mixed_norm(const PotentialSpec& spec, const ExtExponent& r, const ExtExponent& s, TimeInterval interval,
                  double dt, const Grid& grid) {
  PotentialEvaluator ev(spec, grid);
  const double rd = r.to_double();
  const double acc = mixed_norm_power(ev, spec, rd, s.to_double(), interval, dt);
  return std::isinf(rd) ? acc : std::pow(acc, 1.0 / rd);
}

double PatchedNormReport::upper_bound() const noexcept {
  if (!convergent) return kInf;
  const double partial = partial_sums.empty() ? 0.0 : partial_sums.back();
  return partial + tail_bound;
}

PatchedNormReport analytic_patched_norm(const Schedule& schedule, const ExtExponent& r, const ExtExponent& s, int n,
                                        double w_snorm) {
  if (!(w_snorm >= 0)) fail(ErrorKind::Precondition, "profile norm must be non-negative");
  PatchedNormReport rep;
  const double sd = s.to_double();
  const double gain = 2.0 - n / sd;  // power of ε in ‖ε²W(ε·)‖_s
  const double alpha = to_double(schedule.params.alpha);
  const double beta = to_double(schedule.params.beta);
  const double eps_power = schedule.kind() == ScheduleKind::GlobalSubcritical ? -beta / 2 : beta / 2;
  const auto K = static_cast<double>(schedule.windows.size());

  if (r.is_infinite()) {
    double run = 0.0;
    for (const auto& w : schedule.windows) {
      run = std::max(run, std::pow(w.eps, gain) * w_snorm);
      rep.partial_sums.push_back(run);
    }
    rep.exact_norm = run;
    rep.summand_exponent = eps_power * gain;
    rep.convergent = rep.summand_exponent <= 0;
    rep.tail_bound = rep.convergent ? std::pow(K + 1, rep.summand_exponent) * w_snorm : kInf;
    return rep;
  }

  const double rd = r.to_double();
  double exact = 0.0, partial = 0.0;
  for (const auto& w : schedule.windows) {
    const double slice = std::pow(w.eps, gain) * w_snorm;
    exact += w.length * std::pow(slice, rd);
    partial += std::pow(w.length, 1.0 / rd) * slice;
    rep.partial_sums.push_back(partial);
  }
  rep.exact_norm = std::pow(exact, 1.0 / rd);
  const double len_power = schedule.kind() == ScheduleKind::GlobalSubcritical ? alpha : -alpha;
  rep.summand_exponent = len_power / rd + eps_power * gain;
  rep.convergent = rep.summand_exponent < -1;
  const double coef = std::pow(schedule.length_scale, 1.0 / rd) * w_snorm;
  rep.tail_bound = rep.convergent ? coef * std::pow(K, rep.summand_exponent + 1) / (-rep.summand_exponent - 1) : kInf;
  return rep;
}

double power_integral(double e, double a, double b) {
  if (!(a >= 0 && b >= a)) fail(ErrorKind::Precondition, "power integral needs 0 <= a <= b");
  if (a == b) return 0.0;
  if (e == -1.0) {
    if (a == 0) return kInf;
    return std::log(b / a);
  }
  if (a == 0 && e < -1) return kInf;
  return (std::pow(b, e + 1) - std::pow(a, e + 1)) / (e + 1);
}

double analytic_pseudoconformal_norm(const ExtExponent& r, const ExtExponent& s, int n, double delta, double w_snorm) {
  if (!pseudoconformal_ok(r, s, n))
    fail(ErrorKind::Precondition, "(r, s) = (" + r.str() + ", " + s.str() + ") fails the pseudoconformal condition");
  if (!(delta >= 0 && delta <= 1)) fail(ErrorKind::Precondition, "delta must lie in [0, 1]");
  const double rd = r.to_double();
  const double e = rd * (n / s.to_double() - 2.0);
  return std::pow(power_integral(e, delta, 1.0), 1.0 / rd) * w_snorm;
}

// --- partition -------------------------------------------------------------

Partition partition_interval(const PotentialSpec& spec, const ExtExponent& r, const ExtExponent& s,
                             TimeInterval interval, double tau, double dt, const Grid& grid) {
  if (!(tau > 0)) fail(ErrorKind::Precondition, "partition threshold tau must be positive");
  if (!(dt > 0)) fail(ErrorKind::Precondition, "partition slice width must be positive");
  if (!(interval.end > interval.start)) fail(ErrorKind::Precondition, "partition needs a non-empty interval");

  struct Channel {
    const PotentialSpec* spec;
    double r;
    double s;
    std::vector<double> contrib;
  };
  std::vector<Channel> channels;
  if (const auto* sum = std::get_if<SumPotential>(&spec.variant())) {
    for (const auto& t : sum->terms) channels.push_back({t.spec.get(), t.r.to_double(), t.s.to_double(), {}});
  } else {
    channels.push_back({&spec, r.to_double(), s.to_double(), {}});
  }

  const auto m = std::max<long>(1, static_cast<long>(std::ceil(interval.length() / dt - 1e-9)));
  const double w = interval.length() / m;
  auto slice_start = [&](long i) { return i == m ? interval.end : interval.start + i * w; };

  for (auto& ch : channels) {
    PotentialEvaluator ev(*ch.spec, grid);
    ch.contrib.resize(m);
    for (long i = 0; i < m; ++i) {
      ch.contrib[i] = mixed_norm_power(ev, *ch.spec, ch.r, ch.s, {slice_start(i), slice_start(i + 1)}, w);
      if (std::isinf(ch.r) && ch.contrib[i] > tau)
        fail(ErrorKind::CannotPartition, "r = inf and a slice norm exceeds tau; no partition can shrink it");
    }
  }

  auto limit = [&](const Channel& ch) { return std::isinf(ch.r) ? tau : std::pow(tau, ch.r) * (1 + 1e-12); };
  auto norm_of = [&](const Channel& ch, double acc) { return std::isinf(ch.r) ? acc : std::pow(acc, 1.0 / ch.r); };

  Partition part;
  part.slice_width = w;
  std::vector<double> acc(channels.size(), 0.0);
  long first = 0;
  auto close_piece = [&](long end_slice) {
    double norm = 0.0;
    for (std::size_t c = 0; c < channels.size(); ++c) norm = std::max(norm, norm_of(channels[c], acc[c]));
    part.pieces.push_back({slice_start(first), slice_start(end_slice), norm, static_cast<std::size_t>(first),
                           static_cast<std::size_t>(end_slice - first)});
    std::fill(acc.begin(), acc.end(), 0.0);
    first = end_slice;
  };

  for (long i = 0; i < m; ++i) {
    bool overflow = false;
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const auto& ch = channels[c];
      if (ch.contrib[i] > limit(ch))
        fail(ErrorKind::UnsplittableSlice, "slice [" + std::to_string(slice_start(i)) + ", " +
                                               std::to_string(slice_start(i + 1)) +
                                               "] alone exceeds tau; refine dt");
      const double next = std::isinf(ch.r) ? std::max(acc[c], ch.contrib[i]) : acc[c] + ch.contrib[i];
      overflow = overflow || next > limit(ch);
    }
    if (overflow) close_piece(i);
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const auto& ch = channels[c];
      acc[c] = std::isinf(ch.r) ? std::max(acc[c], ch.contrib[i]) : acc[c] + ch.contrib[i];
    }
  }
  close_piece(m);
  return part;
}

void write_window_norms_csv(std::ostream& out, const Schedule& schedule, const ExtExponent& r, const ExtExponent& s,
                            int n, double w_snorm) {
  const double gain = 2.0 - n / s.to_double();
  const double inv_r = r.reciprocal().convert_to<double>();
  out << "k,start,length,eps,piece_norm\n";
  char buf[256];
  for (std::size_t i = 0; i < schedule.windows.size(); ++i) {
    const auto& w = schedule.windows[i];
    const double norm = std::pow(w.length, inv_r) * std::pow(w.eps, gain) * w_snorm;
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", i + 1, w.start, w.length, w.eps, norm);
    out << buf;
  }
}

}  // namespace strz
