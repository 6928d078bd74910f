#pragma once

// Potentials described in an experiment config section. Keys:
//   kind      zero | static | patched | pseudoconformal | modulated
//   profile   gaussian | standing-wave | path to a field snapshot
//   amplitude, width   parameters of the Gaussian profile
//   r, s      exponents of the potential class (patched schedules)
//   schedule  global-subcritical | global-supercritical | local
//   alpha, beta        schedule parameters (selected from r, s if absent)
//   K         number of windows
//   delta     start time of the pseudoconformal interval [delta, 1]
//   total_time         total length of a local cascade (optional)
//   knots, amplitudes  comma lists for the modulated kind

#include "strz/config.hpp"
#include "strz/exponents.hpp"
#include "strz/grid.hpp"
#include "strz/potentials.hpp"

#include <optional>
#include <string>
#include <vector>

namespace strz {

struct PotentialConfig {
  std::string kind = "zero";
  std::string profile = "gaussian";
  double amplitude = -1.0;
  double width = 1.0;
  ExtExponent r{2};
  ExtExponent s{3};
  std::string schedule = "global-subcritical";
  std::optional<Rational> alpha;
  std::optional<Rational> beta;
  int K = 10;
  double delta = 0.1;
  std::optional<double> total_time;
  std::vector<double> knots;
  std::vector<double> amplitudes;
};

PotentialConfig read_potential_config(const ExperimentConfig& cfg, const std::string& section = "potential");
void write_potential_config(ExperimentConfig& cfg, const PotentialConfig& pc,
                            const std::string& section = "potential");

/// Resolves the profile reference on `grid` ("standing-wave" is -μw for the
/// ground pair of the unit Gaussian weight of the given width).
ComplexField resolve_profile(const PotentialConfig& pc, const Grid& grid);

/// Builds the spec; a patched kind without alpha/beta uses the parameter
/// selectors for (r, s, n) with the family headroom.
PotentialSpec build_potential(const PotentialConfig& pc, const Grid& grid);

}  // namespace strz
