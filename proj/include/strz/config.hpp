#pragma once

// Flat experiment configuration: "[section]" headers followed by
// "key = value" lines; '#' and ';' start comments.

#include "strz/exponents.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace strz {

class ExperimentConfig {
 public:
  /// Throws Error(Usage) naming the offending line.
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Canonical text: sections and keys sorted, one "key = value" per line.
  std::string serialize() const;
  /// FNV-1a 64-bit hash of serialize(), as 16 hex digits.
  std::string hash() const;

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, std::string value);
  /// Overwrites this config's entries with those of `other`.
  void merge(const ExperimentConfig& other);

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  ExtExponent get_exponent(const std::string& section, const std::string& key, const ExtExponent& fallback) const;
  std::optional<Rational> get_rational(const std::string& section, const std::string& key) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const noexcept { return data_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

}  // namespace strz
