#include "strz/config.hpp"

#include "strz/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace strz {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  int lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::Usage, "config line " + std::to_string(lineno) + ": unterminated section");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) fail(ErrorKind::Usage, "config line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorKind::Usage, "config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorKind::Usage, "config line " + std::to_string(lineno) + ": empty key");
    cfg.data_[section][std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const auto& [section, kv] : data_) {
    if (kv.empty()) continue;
    if (!section.empty()) {
      if (!out.empty()) out += '\n';
      out += "[" + section + "]\n";
    }
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  }
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  return get(section, key).has_value();
}

std::optional<std::string> ExperimentConfig::get(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s == data_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

void ExperimentConfig::set(const std::string& section, const std::string& key, std::string value) {
  data_[section][key] = std::move(value);
}

void ExperimentConfig::merge(const ExperimentConfig& other) {
  for (const auto& [section, kv] : other.data_)
    for (const auto& [k, v] : kv) data_[section][k] = v;
}

std::string ExperimentConfig::get_string(const std::string& section, const std::string& key,
                                         const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key, double fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    fail(ErrorKind::Usage, where(section, key) + ": '" + *v + "' is not a number");
  }
}

int ExperimentConfig::get_int(const std::string& section, const std::string& key, int fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  int out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size())
    fail(ErrorKind::Usage, where(section, key) + ": '" + *v + "' is not an integer");
  return out;
}

ExtExponent ExperimentConfig::get_exponent(const std::string& section, const std::string& key,
                                           const ExtExponent& fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    return ExtExponent::parse(*v);
  } catch (const Error& e) {
    fail(ErrorKind::Usage, where(section, key) + ": " + e.what());
  }
}

std::optional<Rational> ExperimentConfig::get_rational(const std::string& section, const std::string& key) const {
  auto v = get(section, key);
  if (!v) return std::nullopt;
  return parse_rational(*v);
}

std::vector<double> ExperimentConfig::get_list(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  auto v = get(section, key);
  if (!v) return out;
  std::string item;
  std::stringstream ss(*v);
  while (std::getline(ss, item, ',')) {
    const auto t = std::string(trim(item));
    if (t.empty()) continue;
    try {
      out.push_back(std::stod(t));
    } catch (const std::exception&) {
      fail(ErrorKind::Usage, where(section, key) + ": '" + t + "' is not a number");
    }
  }
  return out;
}

}  // namespace strz
