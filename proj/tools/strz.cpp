#include "strz/acceptance.hpp"
#include "strz/config.hpp"
#include "strz/counterexamples.hpp"
#include "strz/error.hpp"
#include "strz/exponents.hpp"
#include "strz/groundstate.hpp"
#include "strz/parallel.hpp"
#include "strz/potential_config.hpp"
#include "strz/potentials.hpp"
#include "strz/snapshot.hpp"
#include "strz/solver.hpp"
#include "strz/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <list>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace strz;

namespace {

const char* kExitCodes =
    "Exit codes:\n"
    "  0   success\n"
    "  1   unexpected internal error\n"
    "  2   usage: bad flag, config line or value\n"
    "  3   precondition violated\n"
    "  4   dimension out of range\n"
    "  5   exponents in the wrong regime for the request\n"
    "  6   field mass escaped the box guard\n"
    "  7   potential singular at the requested time\n"
    "  8   a single time slice exceeds tau\n"
    "  9   cannot partition (r = inf above tau)\n"
    "  10  Duhamel iteration did not contract\n"
    "  11  eigensolver did not converge\n"
    "  12  weight has no positive part\n"
    "  13  tau calibration failed\n"
    "  14  potential norm diverges\n"
    "  15  file input/output failure\n"
    "  16  an acceptance criterion failed\n"
    "\n"
    "STRZ_THREADS caps the number of worker threads.";

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Flags that override "section.key" entries of the experiment config.
class Overrides {
 public:
  void add(CLI::App* app, const std::string& flag, const std::string& section, const std::string& key,
           const std::string& help) {
    entries_.push_back({nullptr, section, key, {}});
    auto& e = entries_.back();
    e.option = app->add_option(flag, e.value, help + " [" + section + "." + key + "]");
  }
  void apply(ExperimentConfig& cfg) const {
    for (const auto& e : entries_)
      if (e.option->count() > 0) cfg.set(e.section, e.key, e.value);
  }

 private:
  struct Entry {
    CLI::Option* option;
    std::string section;
    std::string key;
    std::string value;
  };
  std::list<Entry> entries_;
};

struct Common {
  std::string config_path;
  std::string out_dir;
  Overrides overrides;
};

void add_common(CLI::App* app, Common& c, const std::string& default_out) {
  c.out_dir = default_out;
  app->add_option("--config", c.config_path, "Experiment config file (INI: [section] key = value)");
  app->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
}

ExperimentConfig resolve_config(const ExperimentConfig& defaults, const Common& c) {
  ExperimentConfig cfg = defaults;
  if (!c.config_path.empty()) cfg.merge(ExperimentConfig::load(c.config_path));
  c.overrides.apply(cfg);
  return cfg;
}

class Bundle {
 public:
  Bundle(std::string command, const ExperimentConfig& cfg, const fs::path& dir)
      : command_(std::move(command)), cfg_(cfg), dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir_.string() + ": " + ec.message());
    write_text("config.ini", cfg_.serialize());
  }

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + (dir_ / name).string());
    files_.push_back(name);
    return out;
  }
  void write_text(const std::string& name, const std::string& text) { open(name) << text; }
  void snapshot(const std::string& name, const ComplexField& f) {
    save_snapshot(dir_ / name, f);
    files_.push_back(name);
  }

  void finish(json results) {
    json doc;
    doc["command"] = command_;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    doc["timestamp"] = stamp;
    doc["config_hash"] = cfg_.hash();
    doc["threads"] = thread_count();
    doc["files"] = files_;
    doc["results"] = std::move(results);
    std::ofstream out(dir_ / "summary.json");
    if (!out) fail(ErrorKind::Io, "cannot write summary.json");
    out << doc.dump(2) << "\n";
    std::cout << "wrote " << (dir_ / "summary.json").string() << "\n";
  }

 private:
  std::string command_;
  ExperimentConfig cfg_;
  fs::path dir_;
  std::vector<std::string> files_;
};

ExtExponent exponent_arg(const std::string& text, const std::string& what) {
  try {
    return ExtExponent::parse(text);
  } catch (const Error& e) {
    fail(ErrorKind::Usage, "bad exponent for " + what + ": '" + text + "' (" + e.what() + ")");
  }
}

// "2:6, 8/3:4"
std::vector<std::pair<ExtExponent, ExtExponent>> parse_pairs(const std::string& text) {
  std::vector<std::pair<ExtExponent, ExtExponent>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) fail(ErrorKind::Usage, "pair '" + item + "' must read p:q");
    out.emplace_back(exponent_arg(item.substr(0, colon), "pair"), exponent_arg(item.substr(colon + 1), "pair"));
  }
  return out;
}

json pair_json(const ExtExponent& p, const ExtExponent& q) { return json{{"p", p.str()}, {"q", q.str()}}; }

Grid read_grid(const ExperimentConfig& cfg) {
  const int n = cfg.get_int("grid", "n", 2);
  const double L = cfg.get_double("grid", "L", 12.0);
  const int N = cfg.get_int("grid", "N", 64);
  return Grid(n, L, N);
}

IterationOptions read_iteration(const ExperimentConfig& cfg) {
  IterationOptions o;
  o.tol = cfg.get_double("iteration", "tol", o.tol);
  o.max_iterations = cfg.get_int("iteration", "max_iterations", o.max_iterations);
  o.z_fallback = cfg.get_double("iteration", "z_fallback", o.z_fallback);
  require(o.tol > 0 && o.max_iterations > 0, ErrorKind::Usage, "iteration.tol and iteration.max_iterations must be positive");
  return o;
}

GroundOptions read_ground_options(const ExperimentConfig& cfg) {
  GroundOptions o;
  o.tol = cfg.get_double("groundstate", "tol", o.tol);
  o.max_iterations = cfg.get_int("groundstate", "max_iterations", o.max_iterations);
  return o;
}

ComplexField initial_data(const ExperimentConfig& cfg, const Grid& grid) {
  const std::string profile = cfg.get_string("initial", "profile", "gaussian");
  const double amplitude = cfg.get_double("initial", "amplitude", 1.0);
  const double width = cfg.get_double("initial", "width", 1.0);
  if (profile == "gaussian") return gaussian_weight(grid, amplitude, width);
  if (profile == "standing-wave") {
    ComplexField u = standing_wave_potential(ground_pair(gaussian_weight(grid, 1.0, width))).u0;
    u *= amplitude;
    return u;
  }
  ComplexField u = load_snapshot(profile);
  require(u.grid() == grid, ErrorKind::Usage, "initial snapshot grid differs from [grid]");
  return u;
}

Source read_source(const ExperimentConfig& cfg, const Grid& grid) {
  const std::string kind = cfg.get_string("source", "kind", "none");
  if (kind == "none") return nullptr;
  require(kind == "gaussian", ErrorKind::Usage, "source.kind must be none or gaussian");
  const double omega = cfg.get_double("source", "omega", 1.0);
  const ComplexField shape =
      gaussian_weight(grid, cfg.get_double("source", "amplitude", 1.0), cfg.get_double("source", "width", 1.0));
  return [shape, omega](double t, const Grid& g) {
    require(g == shape.grid(), ErrorKind::Precondition, "source requested on a foreign grid");
    ComplexField f = shape;
    f *= std::cos(omega * t);
    return f;
  };
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,l2_norm,linf_norm\n";
  for (std::size_t j = 0; j < traj.size(); ++j)
    out << num(traj.times[j]) << "," << num(lq_norm(traj.states[j], 2.0)) << ","
        << num(lq_norm(traj.states[j], ExtExponent::infinity())) << "\n";
}

json ratios_json(const std::vector<StrichartzRatio>& ratios) {
  json arr = json::array();
  for (const auto& r : ratios) arr.push_back({{"p", r.p.str()}, {"q", r.q.str()}, {"ratio", r.ratio}});
  return arr;
}

json factors_json(const std::vector<double>& f) {
  json arr = json::array();
  for (double v : f) arr.push_back(v);
  return arr;
}

// --- admissible / params --------------------------------------------------

int cmd_admissible(const std::string& p_text, const std::string& q_text, int n, const std::string& r_text,
                   const std::string& s_text) {
  const ExtExponent p = exponent_arg(p_text, "--p"), q = exponent_arg(q_text, "--q");
  std::cout << "p = " << p.str() << ", q = " << q.str() << ", n = " << n << "\n";
  const bool adm = is_admissible(p, q, n);
  std::cout << "admissible: " << (adm ? "true" : "false") << "\n";
  std::cout << "dual: (" << dual(p).str() << ", " << dual(q).str() << ")\n";
  if (!r_text.empty() || !s_text.empty()) {
    require(!r_text.empty() && !s_text.empty(), ErrorKind::Usage, "--r and --s go together");
    const ExtExponent r = exponent_arg(r_text, "--r"), s = exponent_arg(s_text, "--s");
    const auto cls = classify_potential(r, s, n);
    std::cout << "potential class (r, s) = (" << r.str() << ", " << s.str() << "): " << to_string(cls.criticality)
              << ", 1/r + n/(2s) = " << to_string(cls.rho) << ", scaling exponent "
              << to_string(scaling_exponent(r, s, n)) << "\n";
    if (cls.criticality == Criticality::Critical) {
      if (!r.is_infinite() && r >= ExtExponent(2)) {
        const auto h = holder_split_case_a(r, s, n);
        std::cout << "holder split: (" << h.p.str() << ", " << h.q.str() << ")\n";
      }
      if (r <= ExtExponent(2)) {
        try {
          const auto d = dual_pair_case_b(r, s, n);
          std::cout << "dual pair: admissible (" << d.admissible.p.str() << ", " << d.admissible.q.str()
                    << "), dual (" << d.dual_p.str() << ", " << d.dual_q.str() << ")\n";
        } catch (const Error& e) {
          std::cout << "dual pair: unavailable (" << e.what() << ")\n";
        }
      }
    }
  }
  return 0;
}

void print_params(const char* label, const ScheduleParams& sp, const ExtExponent& r, const ExtExponent& s, int n) {
  std::cout << label << ": alpha = " << to_string(sp.alpha) << ", beta = " << to_string(sp.beta)
            << ", invariant " << (satisfies_invariant(sp, r, s, n) ? "holds" : "fails") << "\n";
}

int cmd_params(const std::string& r_text, const std::string& s_text, int n, const std::string& headroom_text) {
  const ExtExponent r = exponent_arg(r_text, "--r"), s = exponent_arg(s_text, "--s");
  Rational headroom = default_headroom();
  if (!headroom_text.empty()) {
    try {
      headroom = parse_rational(headroom_text);
    } catch (const Error& e) {
      fail(ErrorKind::Usage, std::string("bad --headroom: ") + e.what());
    }
  }
  const auto cls = classify_potential(r, s, n);
  std::cout << "(r, s, n) = (" << r.str() << ", " << s.str() << ", " << n << ")\n";
  std::cout << "class: " << to_string(cls.criticality) << ", 1/r + n/(2s) = " << to_string(cls.rho) << "\n";
  std::cout << "scaling exponent: " << to_string(scaling_exponent(r, s, n)) << "\n";
  switch (cls.criticality) {
    case Criticality::Subcritical:
      print_params("global-subcritical", global_subcritical_params(r, s, n, headroom), r, s, n);
      break;
    case Criticality::Supercritical:
      print_params("global-supercritical",
                   supercritical_params(r, s, n, ScheduleKind::GlobalSupercritical, headroom), r, s, n);
      try {
        print_params("local", local_params(r, s, n, headroom), r, s, n);
      } catch (const Error& e) {
        std::cout << "local: unavailable (" << e.what() << ")\n";
      }
      break;
    case Criticality::Critical:
      std::cout << "critical class: no cascade schedule\n";
      break;
  }
  if (!r.is_infinite() && s > ExtExponent(Rational(n, 2)) && !s.is_infinite() && s < ExtExponent(n)) {
    const auto pc = pseudoconformal_conditions(r, s, n);
    std::cout << "pseudoconformal: " << (pc.holder_form ? "applies" : "does not apply") << "\n";
  } else {
    std::cout << "pseudoconformal: needs n/2 < s < n and finite r\n";
  }
  return 0;
}

// --- simulate -------------------------------------------------------------

ExperimentConfig simulate_defaults() {
  ExperimentConfig d;
  d.set("grid", "n", "2");
  d.set("grid", "L", "12");
  d.set("grid", "N", "64");
  d.set("simulate", "method", "split");
  d.set("simulate", "t0", "0");
  d.set("simulate", "t1", "1");
  d.set("simulate", "dt", "0.01");
  d.set("simulate", "sample_every", "10");
  d.set("simulate", "pairs", "4:4, inf:2");
  d.set("simulate", "tau", "auto");
  d.set("simulate", "r", "2");
  d.set("simulate", "s", "2");
  d.set("simulate", "snapshot", "false");
  d.set("initial", "profile", "gaussian");
  d.set("potential", "kind", "zero");
  d.set("source", "kind", "none");
  return d;
}

int cmd_simulate(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const Grid grid = read_grid(cfg);
  const ComplexField u0 = initial_data(cfg, grid);
  const PotentialSpec V = build_potential(read_potential_config(cfg), grid);
  const Source F = read_source(cfg, grid);
  const std::string method = cfg.get_string("simulate", "method", "split");
  const TimeInterval interval{cfg.get_double("simulate", "t0", 0.0), cfg.get_double("simulate", "t1", 1.0)};
  const double dt = cfg.get_double("simulate", "dt", 0.01);
  require(interval.length() > 0, ErrorKind::Usage, "simulate.t1 must exceed simulate.t0");
  require(dt > 0 && dt <= interval.length(), ErrorKind::Usage, "simulate.dt must lie in (0, t1 - t0]");
  const int sample_every = cfg.get_int("simulate", "sample_every", 10);
  require(sample_every > 0, ErrorKind::Usage, "simulate.sample_every must be positive");
  const auto pairs = parse_pairs(cfg.get_string("simulate", "pairs", ""));
  for (const auto& [p, q] : pairs)
    require(is_admissible(p, q, grid.dim()), ErrorKind::Usage,
            "pair (" + p.str() + ", " + q.str() + ") is not admissible in dimension " + std::to_string(grid.dim()));

  Bundle bundle("simulate", cfg, out_dir);
  json res;
  res["method"] = method;
  res["grid"] = {{"n", grid.dim()}, {"L", grid.half_width()}, {"N", grid.points()}};
  res["potential"] = V.kind_name();

  Trajectory traj;
  if (method == "split") {
    EvolveOptions eo;
    eo.sample_every = sample_every;
    eo.pairs = pairs;
    const SolveReport rep = split_step_evolve(u0, V, F, interval, dt, eo);
    traj = rep.trajectory;
    res["energy_drift"] = rep.energy_drift;
    res["strichartz_ratios"] = ratios_json(rep.strichartz_ratios);
  } else if (method == "duhamel" || method == "frozen") {
    const int steps = static_cast<int>(std::ceil(interval.length() / dt - 1e-9));
    const DuhamelResult dr = method == "duhamel" ? duhamel_iterate(u0, F, V, interval, steps, read_iteration(cfg))
                                                 : frozen_duhamel(u0, F, V, interval, steps, read_iteration(cfg));
    for (std::size_t j = 0; j < dr.trajectory.size(); ++j)
      if (j % sample_every == 0 || j + 1 == dr.trajectory.size())
        traj.push(dr.trajectory.times[j], dr.trajectory.states[j]);
    res["iterations"] = dr.iterations;
    res["contraction_factors"] = factors_json(dr.contraction_factors);
    res["residual"] = dr.residual;
    res["z_norm"] = z_norm(dr.trajectory, read_iteration(cfg).z_fallback);
    double lo = dr.trajectory.energy_log.front(), hi = lo;
    for (double e : dr.trajectory.energy_log) lo = std::min(lo, e), hi = std::max(hi, e);
    res["energy_drift"] = (hi - lo) / dr.trajectory.energy_log.front();
  } else if (method == "global") {
    const ExtExponent r = cfg.get_exponent("simulate", "r", ExtExponent(2));
    const ExtExponent s = cfg.get_exponent("simulate", "s", ExtExponent(2));
    const std::string tau_text = cfg.get_string("simulate", "tau", "auto");
    double tau = 0.0;
    if (tau_text == "auto") {
      CalibrationOptions co;
      co.iteration = read_iteration(cfg);
      co.interval = {interval.start, std::min(interval.end, interval.start + 1.0)};
      tau = calibrate_tau({V}, u0, r, s, dt, co);
    } else {
      tau = cfg.get_double("simulate", "tau", 0.0);
      require(tau > 0, ErrorKind::Usage, "simulate.tau must be positive or auto");
    }
    GlobalOptions go;
    go.iteration = read_iteration(cfg);
    go.sample_every = sample_every;
    go.pairs = pairs;
    const SolveReport rep = solve_global(u0, F, V, interval, r, s, tau, dt, go);
    traj = rep.trajectory;
    res["tau"] = rep.tau;
    res["c_hat"] = rep.c_hat;
    res["pieces"] = rep.pieces.size();
    res["bound"] = rep.bound;
    res["energy_drift"] = rep.energy_drift;
    res["strichartz_ratios"] = ratios_json(rep.strichartz_ratios);
    auto out = bundle.open("pieces.csv");
    out << "piece,start,end,norm,iterations,max_factor\n";
    for (std::size_t i = 0; i < rep.pieces.size(); ++i) {
      const auto& pc = rep.pieces[i];
      double mf = 0.0;
      for (double f : pc.contraction_factors) mf = std::max(mf, f);
      out << i << "," << num(pc.piece.start) << "," << num(pc.piece.end) << "," << num(pc.piece.norm) << ","
          << pc.iterations << "," << num(mf) << "\n";
    }
  } else {
    fail(ErrorKind::Usage, "simulate.method must be split, duhamel, frozen or global");
  }
  {
    auto out = bundle.open("trajectory.csv");
    write_trajectory_csv(out, traj);
  }
  if (cfg.get_string("simulate", "snapshot", "false") == "true") bundle.snapshot("final.bin", traj.states.back());
  res["samples"] = traj.size();
  res["final_l2_norm"] = lq_norm(traj.states.back(), 2.0);
  std::cout << "method " << method << ", " << traj.size() << " samples";
  if (res.contains("energy_drift")) std::cout << ", energy drift " << res["energy_drift"].get<double>();
  std::cout << "\n";
  bundle.finish(std::move(res));
  return 0;
}

// --- eigensolve -----------------------------------------------------------

ExperimentConfig eigensolve_defaults() {
  ExperimentConfig d;
  d.set("grid", "n", "1");
  d.set("grid", "L", "12");
  d.set("grid", "N", "64");
  d.set("groundstate", "amplitude", "1");
  d.set("groundstate", "width", "1");
  d.set("groundstate", "snapshot", "false");
  return d;
}

int cmd_eigensolve(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const Grid grid = read_grid(cfg);
  const ComplexField w = gaussian_weight(grid, cfg.get_double("groundstate", "amplitude", 1.0),
                                         cfg.get_double("groundstate", "width", 1.0));
  const GroundPair gp = ground_pair(w, read_ground_options(cfg));
  const StandingWave sw = standing_wave_potential(gp);

  Bundle bundle("eigensolve", cfg, out_dir);
  {
    // Line through the origin along the first axis.
    auto out = bundle.open("profile.csv");
    out << "x,f,w\n";
    const int N = grid.points();
    std::size_t stride = 1;
    for (int a = 1; a < grid.dim(); ++a) stride *= N;
    std::size_t offset = 0;
    for (int a = 1; a < grid.dim(); ++a) offset = offset * N + N / 2;
    for (int j = 0; j < N; ++j) {
      const std::size_t idx = j * stride + offset;
      out << num(grid.coordinate(j)) << "," << num(gp.f[idx].real()) << "," << num(w[idx].real()) << "\n";
    }
  }
  if (cfg.get_string("groundstate", "snapshot", "false") == "true") {
    bundle.snapshot("ground_state.bin", gp.f);
    bundle.snapshot("potential.bin", sw.W);
  }
  std::printf("mu = %.15g\nresidual = %.3g\niterations = %d\n", gp.mu, gp.residual, gp.iterations);
  json res;
  res["grid"] = {{"n", grid.dim()}, {"L", grid.half_width()}, {"N", grid.points()}};
  res["mu"] = gp.mu;
  res["residual"] = gp.residual;
  res["iterations"] = gp.iterations;
  res["spectral_tail"] = gp.spectral_tail;
  res["standing_wave_residual"] = sw.residual;
  res["variational_energy"] = gradient_energy(gp.f) + std::pow(lq_norm(gp.f, 2.0), 2);
  bundle.finish(std::move(res));
  return 0;
}

// --- partition ------------------------------------------------------------

ExperimentConfig partition_defaults() {
  ExperimentConfig d;
  d.set("grid", "n", "2");
  d.set("grid", "L", "12");
  d.set("grid", "N", "64");
  d.set("potential", "kind", "static");
  d.set("partition", "r", "2");
  d.set("partition", "s", "2");
  d.set("partition", "tau", "1");
  d.set("partition", "dt", "0.01");
  d.set("partition", "t0", "0");
  d.set("partition", "t1", "10");
  return d;
}

int cmd_partition(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const Grid grid = read_grid(cfg);
  const PotentialConfig pcfg = read_potential_config(cfg);
  const PotentialSpec V = build_potential(pcfg, grid);
  const ExtExponent r = cfg.get_exponent("partition", "r", ExtExponent(2));
  const ExtExponent s = cfg.get_exponent("partition", "s", ExtExponent(2));
  const double tau = cfg.get_double("partition", "tau", 1.0);
  const double dt = cfg.get_double("partition", "dt", 0.01);
  const TimeInterval interval{cfg.get_double("partition", "t0", 0.0), cfg.get_double("partition", "t1", 10.0)};
  require(interval.length() > 0, ErrorKind::Usage, "partition.t1 must exceed partition.t0");
  require(dt > 0, ErrorKind::Usage, "partition.dt must be positive");

  const Partition part = partition_interval(V, r, s, interval, tau, dt, grid);
  Bundle bundle("partition", cfg, out_dir);
  {
    auto out = bundle.open("pieces.csv");
    out << "piece,start,end,norm,slices\n";
    for (std::size_t i = 0; i < part.pieces.size(); ++i) {
      const auto& pc = part.pieces[i];
      out << i << "," << num(pc.start) << "," << num(pc.end) << "," << num(pc.norm) << "," << pc.slice_count << "\n";
    }
  }
  json res;
  res["potential"] = V.kind_name();
  res["r"] = r.str();
  res["s"] = s.str();
  res["tau"] = tau;
  res["pieces"] = part.count();
  res["slice_width"] = part.slice_width;
  res["total_norm"] = mixed_norm(V, r, s, interval, dt, grid);
  if (const auto* p = std::get_if<PatchedRescaled>(&V.variant())) {
    auto out = bundle.open("window_norms.csv");
    write_window_norms_csv(out, p->schedule, r, s, grid.dim(), lq_norm(p->profile, s));
    const auto rep = analytic_patched_norm(p->schedule, r, s, grid.dim(), lq_norm(p->profile, s));
    res["analytic_norm"] = rep.exact_norm;
    res["certified_bound"] = rep.upper_bound();
    res["convergent"] = rep.convergent;
  }
  std::cout << part.count() << " pieces with tau = " << tau << "\n";
  bundle.finish(std::move(res));
  return 0;
}

// --- counterexample -------------------------------------------------------

ExperimentConfig counterexample_defaults() {
  ExperimentConfig d;
  d.set("counterexample", "kind", "global-subcritical");
  d.set("counterexample", "r", "4");
  d.set("counterexample", "s", "6");
  d.set("counterexample", "n", "3");
  d.set("counterexample", "K", "200");
  d.set("counterexample", "delta", "0.1");
  d.set("counterexample", "pairs", "2:6, 8/3:4");
  d.set("counterexample", "crosscheck", "");
  d.set("counterexample", "crosscheck_dt", "0.05");
  return d;
}

// Grid and weight width per dimension, chosen so the ground state passes the
// box guard.
Grid counterexample_grid(const ExperimentConfig& cfg, int n) {
  const double L = cfg.get_double("grid", "L", n == 1 ? 12.0 : 16.0);
  const int N = cfg.get_int("grid", "N", n == 1 ? 64 : n == 2 ? 128 : 32);
  require(!cfg.has("grid", "n") || cfg.get_int("grid", "n", n) == n, ErrorKind::Usage,
          "grid.n disagrees with counterexample.n");
  return Grid(n, L, N);
}

int cmd_counterexample(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const std::string kind_text = cfg.get_string("counterexample", "kind", "global-subcritical");
  const auto kind = parse_family_kind(kind_text);
  if (!kind) fail(ErrorKind::Usage, "unknown family kind '" + kind_text + "'");
  const ExtExponent r = cfg.get_exponent("counterexample", "r", ExtExponent(4));
  const ExtExponent s = cfg.get_exponent("counterexample", "s", ExtExponent(6));
  const int n = cfg.get_int("counterexample", "n", 3);
  const int K = cfg.get_int("counterexample", "K", 200);
  require(K >= 1, ErrorKind::Usage, "counterexample.K must be positive");
  const auto pairs = parse_pairs(cfg.get_string("counterexample", "pairs", "2:6"));
  for (const auto& [p, q] : pairs)
    require(is_admissible(p, q, n), ErrorKind::Usage, "pair (" + p.str() + ", " + q.str() + ") is not admissible");

  const Grid grid = counterexample_grid(cfg, n);
  const double width = cfg.get_double("groundstate", "width", n == 3 ? 2.0 : 1.0);
  const GroundPair gp = ground_pair(gaussian_weight(grid, 1.0, width), read_ground_options(cfg));
  const StandingWave sw = standing_wave_potential(gp);

  const CounterexampleFamily fam = [&] {
    if (*kind == FamilyKind::Pseudoconformal)
      return pseudoconformal_build(sw.W, sw.u0, r, s, n, cfg.get_double("counterexample", "delta", 0.1)).family;
    std::optional<double> total;
    if (cfg.has("counterexample", "total_time")) total = cfg.get_double("counterexample", "total_time", 1.0);
    return build_family(*kind, r, s, n, sw.W, sw.u0, K, total);
  }();

  Bundle bundle("counterexample", cfg, out_dir);
  json res;
  res["kind"] = to_string(*kind);
  res["r"] = r.str();
  res["s"] = s.str();
  res["n"] = n;
  res["K"] = K;
  res["grid"] = {{"L", grid.half_width()}, {"N", grid.points()}, {"weight_width", width}};
  res["mu"] = gp.mu;
  if (fam.schedule)
    res["schedule"] = {{"alpha", to_string(fam.schedule->params.alpha)},
                       {"beta", to_string(fam.schedule->params.beta)},
                       {"total_time", fam.total_time}};
  res["potential_norm"] = fam.analytic_potential_norm;
  res["certified_bound"] = fam.certified_bound;
  if (fam.patched_report) {
    res["convergent"] = fam.patched_report->convergent;
    res["summand_exponent"] = fam.patched_report->summand_exponent;
    res["tail_bound"] = fam.patched_report->tail_bound;
  }
  json series = json::array();
  for (const auto& [p, q] : pairs) {
    const RatioSeries rs = ratio_series(fam, p, q);
    const std::string name = "ratio_p" + p.str() + "_q" + q.str() + ".csv";
    std::string file = name;
    std::replace(file.begin(), file.end(), '/', '_');
    {
      auto out = bundle.open(file);
      write_ratio_csv(out, rs);
    }
    json e = pair_json(p, q);
    e["file"] = file;
    e["predicted_slope"] = rs.predicted_slope;
    e["fit_range"] = {rs.fit_from, rs.fit_to};
    e["excluded"] = rs.excluded;
    const double growth = rs.ratio.back() / rs.ratio.front();
    e["growth"] = growth;
    if (rs.fitted_slope) {
      const double rel = std::abs(*rs.fitted_slope - rs.predicted_slope) / std::abs(rs.predicted_slope);
      e["fitted_slope"] = *rs.fitted_slope;
      e["relative_slope_error"] = rel;
      e["verdict"] = rs.excluded ? "excluded" : rel < 0.1 && rs.predicted_slope > 0 ? "diverges" : "inconclusive";
      std::printf("(%s, %s): slope %.6f, predicted %.6f, R_K/R_1 = %.4g, %s\n", p.str().c_str(), q.str().c_str(),
                  *rs.fitted_slope, rs.predicted_slope, growth, e["verdict"].get<std::string>().c_str());
    } else {
      e["verdict"] = rs.excluded ? "excluded" : "inconclusive";
    }
    series.push_back(std::move(e));
  }
  res["series"] = std::move(series);

  const auto windows = cfg.get_list("counterexample", "crosscheck");
  if (!windows.empty()) {
    require(fam.schedule.has_value(), ErrorKind::Usage, "crosscheck needs a cascade family");
    std::vector<int> ks;
    for (double v : windows) ks.push_back(static_cast<int>(v));
    const auto checks = window_crosscheck(fam, ks, cfg.get_double("counterexample", "crosscheck_dt", 0.05), pairs);
    json arr = json::array();
    auto out = bundle.open("crosscheck.csv");
    out << "k,p,q,numeric,closed_form,relative_error\n";
    for (const auto& wc : checks) {
      json e{{"k", wc.k},
             {"eps", wc.eps},
             {"steps", wc.steps},
             {"energy_start", wc.energy_start},
             {"energy_expected", wc.energy_expected},
             {"phase_error", wc.phase_error}};
      for (const auto& wn : wc.norms)
        out << wc.k << "," << wn.p.str() << "," << wn.q.str() << "," << num(wn.numeric) << ","
            << num(wn.closed_form) << "," << num(wn.relative_error()) << "\n";
      arr.push_back(std::move(e));
    }
    res["crosscheck"] = std::move(arr);
  }
  std::printf("potential norm %.6g, certified bound %.6g\n", fam.analytic_potential_norm, fam.certified_bound);
  bundle.finish(std::move(res));
  return 0;
}

// --- verify ---------------------------------------------------------------

int cmd_verify(const std::vector<int>& ids, bool verbose, const std::string& out_dir) {
  for (int id : ids)
    require(id >= 1 && id <= acceptance::criterion_count(), ErrorKind::Usage,
            "no criterion " + std::to_string(id));
  json arr = json::array();
  bool ok = true;
  std::vector<int> todo = ids;
  if (todo.empty())
    for (int i = 1; i <= acceptance::criterion_count(); ++i) todo.push_back(i);
  for (int id : todo) {
    const auto r = acceptance::run_criterion(id);
    std::cout << acceptance::summary_line(r) << std::endl;
    if (verbose || !r.passed)
      for (const auto& d : r.details) std::cout << "    " << d << "\n";
    ok = ok && r.passed;
    arr.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"seconds", r.seconds}, {"details", r.details}});
  }
  if (!out_dir.empty()) {
    ExperimentConfig cfg;
    std::string list;
    for (int id : todo) list += (list.empty() ? "" : ", ") + std::to_string(id);
    cfg.set("verify", "criteria", list);
    Bundle bundle("verify", cfg, out_dir);
    bundle.finish(json{{"all_passed", ok}, {"criteria", std::move(arr)}});
  }
  if (!ok) fail(ErrorKind::AcceptanceFailure, "acceptance criteria failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strz: numerical lab for Strichartz estimates of i u_t - Δu + V(t,x) u = F"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  std::string p_text, q_text, r_text, s_text, headroom_text;
  int n = 3;
  auto* adm = app.add_subcommand("admissible", "Admissibility, duals and class of exponent pairs");
  adm->add_option("--p", p_text, "Time exponent p")->required();
  adm->add_option("--q", q_text, "Space exponent q")->required();
  adm->add_option("--n", n, "Dimension")->required();
  adm->add_option("--r", r_text, "Potential time exponent r (optional)");
  adm->add_option("--s", s_text, "Potential space exponent s (optional)");

  auto* par = app.add_subcommand("params", "Potential class and cascade schedule parameters for (r, s, n)");
  par->add_option("--r", r_text, "Potential time exponent r")->required();
  par->add_option("--s", s_text, "Potential space exponent s")->required();
  par->add_option("--n", n, "Dimension")->required();
  par->add_option("--headroom", headroom_text, "Selector headroom (rational)");

  Common sim_c, eig_c, part_c, ce_c;
  auto* sim = app.add_subcommand("simulate", "Evolve initial data (split-step, Duhamel iteration or global solve)");
  add_common(sim, sim_c, "strz-out/simulate");
  sim_c.overrides.add(sim, "--n", "grid", "n", "Dimension");
  sim_c.overrides.add(sim, "--L", "grid", "L", "Box half-width");
  sim_c.overrides.add(sim, "--N", "grid", "N", "Points per axis");
  sim_c.overrides.add(sim, "--method", "simulate", "method", "split | duhamel | frozen | global");
  sim_c.overrides.add(sim, "--t1", "simulate", "t1", "End time");
  sim_c.overrides.add(sim, "--dt", "simulate", "dt", "Time step");
  sim_c.overrides.add(sim, "--tau", "simulate", "tau", "Partition threshold or auto");
  sim_c.overrides.add(sim, "--pairs", "simulate", "pairs", "Admissible pairs p:q, comma separated");
  sim_c.overrides.add(sim, "--potential", "potential", "kind", "zero | static | patched | pseudoconformal | modulated");
  sim_c.overrides.add(sim, "--initial", "initial", "profile", "gaussian | standing-wave | snapshot path");

  auto* eig = app.add_subcommand("eigensolve", "Ground pair of -Δf + f = μ w f for a Gaussian weight");
  add_common(eig, eig_c, "strz-out/eigensolve");
  eig_c.overrides.add(eig, "--n", "grid", "n", "Dimension");
  eig_c.overrides.add(eig, "--L", "grid", "L", "Box half-width");
  eig_c.overrides.add(eig, "--N", "grid", "N", "Points per axis");
  eig_c.overrides.add(eig, "--width", "groundstate", "width", "Weight width");
  eig_c.overrides.add(eig, "--amplitude", "groundstate", "amplitude", "Weight amplitude");

  auto* part = app.add_subcommand("partition", "Split a time interval into pieces of small mixed norm");
  add_common(part, part_c, "strz-out/partition");
  part_c.overrides.add(part, "--n", "grid", "n", "Dimension");
  part_c.overrides.add(part, "--potential", "potential", "kind", "Potential kind");
  part_c.overrides.add(part, "--r", "partition", "r", "Time exponent r");
  part_c.overrides.add(part, "--s", "partition", "s", "Space exponent s");
  part_c.overrides.add(part, "--tau", "partition", "tau", "Threshold");
  part_c.overrides.add(part, "--dt", "partition", "dt", "Slice width");
  part_c.overrides.add(part, "--t1", "partition", "t1", "End time");

  auto* ce = app.add_subcommand("counterexample", "Strichartz ratio series of a counterexample family");
  add_common(ce, ce_c, "strz-out/counterexample");
  ce_c.overrides.add(ce, "--kind", "counterexample", "kind",
                     "global-subcritical | global-supercritical | local | pseudoconformal");
  ce_c.overrides.add(ce, "--r", "counterexample", "r", "Potential time exponent r");
  ce_c.overrides.add(ce, "--s", "counterexample", "s", "Potential space exponent s");
  ce_c.overrides.add(ce, "--n", "counterexample", "n", "Dimension");
  ce_c.overrides.add(ce, "--K", "counterexample", "K", "Number of windows");
  ce_c.overrides.add(ce, "--delta", "counterexample", "delta", "Pseudoconformal start time");
  ce_c.overrides.add(ce, "--total-time", "counterexample", "total_time", "Total time of a local cascade");
  ce_c.overrides.add(ce, "--pairs", "counterexample", "pairs", "Admissible pairs p:q, comma separated");
  ce_c.overrides.add(ce, "--crosscheck", "counterexample", "crosscheck", "Windows to evolve numerically");

  std::vector<int> ids;
  bool verbose = false;
  std::string verify_out;
  auto* ver = app.add_subcommand("verify", "Run the acceptance criteria");
  ver->add_option("--only", ids, "Criterion numbers to run")->delimiter(',');
  ver->add_flag("-v,--verbose", verbose, "Print details of passing criteria too");
  ver->add_option("--out", verify_out, "Write a JSON report to this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::Usage);
  }

  try {
    if (adm->parsed()) return cmd_admissible(p_text, q_text, n, r_text, s_text);
    if (par->parsed()) return cmd_params(r_text, s_text, n, headroom_text);
    if (sim->parsed()) return cmd_simulate(resolve_config(simulate_defaults(), sim_c), sim_c.out_dir);
    if (eig->parsed()) return cmd_eigensolve(resolve_config(eigensolve_defaults(), eig_c), eig_c.out_dir);
    if (part->parsed()) return cmd_partition(resolve_config(partition_defaults(), part_c), part_c.out_dir);
    if (ce->parsed()) return cmd_counterexample(resolve_config(counterexample_defaults(), ce_c), ce_c.out_dir);
    if (ver->parsed()) return cmd_verify(ids, verbose, verify_out);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
