#include "strz/potential_config.hpp"

#include "strz/counterexamples.hpp"
#include "strz/error.hpp"
#include "strz/groundstate.hpp"
#include "strz/snapshot.hpp"

#include <cstdio>

namespace strz {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

}  // namespace

PotentialConfig read_potential_config(const ExperimentConfig& cfg, const std::string& section) {
  PotentialConfig pc;
  pc.kind = cfg.get_string(section, "kind", pc.kind);
  pc.profile = cfg.get_string(section, "profile", pc.profile);
  pc.amplitude = cfg.get_double(section, "amplitude", pc.amplitude);
  pc.width = cfg.get_double(section, "width", pc.width);
  pc.r = cfg.get_exponent(section, "r", pc.r);
  pc.s = cfg.get_exponent(section, "s", pc.s);
  pc.schedule = cfg.get_string(section, "schedule", pc.schedule);
  pc.alpha = cfg.get_rational(section, "alpha");
  pc.beta = cfg.get_rational(section, "beta");
  pc.K = cfg.get_int(section, "K", pc.K);
  pc.delta = cfg.get_double(section, "delta", pc.delta);
  if (cfg.has(section, "total_time")) pc.total_time = cfg.get_double(section, "total_time", 0.0);
  pc.knots = cfg.get_list(section, "knots");
  pc.amplitudes = cfg.get_list(section, "amplitudes");
  return pc;
}

void write_potential_config(ExperimentConfig& cfg, const PotentialConfig& pc, const std::string& section) {
  cfg.set(section, "kind", pc.kind);
  cfg.set(section, "profile", pc.profile);
  cfg.set(section, "amplitude", format_double(pc.amplitude));
  cfg.set(section, "width", format_double(pc.width));
  cfg.set(section, "r", pc.r.str());
  cfg.set(section, "s", pc.s.str());
  cfg.set(section, "schedule", pc.schedule);
  if (pc.alpha) cfg.set(section, "alpha", to_string(*pc.alpha));
  if (pc.beta) cfg.set(section, "beta", to_string(*pc.beta));
  cfg.set(section, "K", std::to_string(pc.K));
  cfg.set(section, "delta", format_double(pc.delta));
  if (pc.total_time) cfg.set(section, "total_time", format_double(*pc.total_time));
  if (!pc.knots.empty()) cfg.set(section, "knots", join(pc.knots));
  if (!pc.amplitudes.empty()) cfg.set(section, "amplitudes", join(pc.amplitudes));
}

ComplexField resolve_profile(const PotentialConfig& pc, const Grid& grid) {
  if (pc.profile == "gaussian") return gaussian_weight(grid, pc.amplitude, pc.width);
  if (pc.profile == "standing-wave") {
    const GroundPair gp = ground_pair(gaussian_weight(grid, 1.0, pc.width));
    return standing_wave_potential(gp).W;
  }
  ComplexField f = load_snapshot(pc.profile);
  if (!(f.grid() == grid)) {
    if (f.grid().dim() != grid.dim())
      fail(ErrorKind::Precondition, "snapshot " + pc.profile + " has the wrong dimension");
  }
  return f;
}

PotentialSpec build_potential(const PotentialConfig& pc, const Grid& grid) {
  if (pc.kind == "zero") return PotentialSpec::zero();
  ComplexField profile = resolve_profile(pc, grid);
  if (pc.kind == "static") return PotentialSpec::static_profile(std::move(profile));
  if (pc.kind == "pseudoconformal") return PotentialSpec::pseudoconformal(std::move(profile));
  if (pc.kind == "modulated")
    return PotentialSpec::modulated(std::move(profile), pc.knots, pc.amplitudes, Interpolation::Linear);
  if (pc.kind == "patched") {
    auto kind = parse_schedule_kind(pc.schedule);
    if (!kind) fail(ErrorKind::Usage, "unknown schedule '" + pc.schedule + "'");
    ScheduleParams params;
    if (pc.alpha && pc.beta) {
      params = {*pc.alpha, *pc.beta, *kind};
    } else if (*kind == ScheduleKind::GlobalSubcritical) {
      params = global_subcritical_params(pc.r, pc.s, grid.dim(), family_headroom());
    } else {
      params = supercritical_params(pc.r, pc.s, grid.dim(), *kind, family_headroom());
    }
    return PotentialSpec::patched(std::move(profile), make_schedule(params, pc.K, pc.total_time));
  }
  fail(ErrorKind::Usage, "unknown potential kind '" + pc.kind + "'");
}

}  // namespace strz
