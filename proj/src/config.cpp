#include "fkpp/config.hpp"

#include <charconv>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

namespace fkpp {

namespace {

const std::map<std::string, std::set<std::string>>& vocabulary() {
  static const std::map<std::string, std::set<std::string>> v{
      {"model", {"p", "q", "A", "B", "K"}},
      {"grid", {"L", "n"}},
      {"solver",
       {"theta", "dt0", "sigma", "blowup_threshold", "decay_threshold", "t_max",
        "snapshot_interval"}},
      {"experiment",
       {"C", "kappa", "h0", "t_end", "kappa_lo", "kappa_hi", "iters", "subsolution",
        "lattice_nx", "lattice_nt", "lattice_x_max", "lattice_t_max", "fit_start", "fit_end",
        "tolerance"}},
  };
  return v;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<ConfigValue> parse_value(std::string_view raw) {
  if (raw == "true") return ConfigValue{true};
  if (raw == "false") return ConfigValue{false};
  static const std::regex number(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  const std::string s(raw);
  if (!std::regex_match(s, number)) return std::nullopt;
  double v = 0.0;
  const char* first = s.data() + (s.front() == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return ConfigValue{v};
}

}  // namespace

void ExperimentConfig::set(const std::string& section, const std::string& key,
                           ConfigValue value) {
  values_[section][key] = value;
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const ConfigValue* ExperimentConfig::find(const std::string& section,
                                          const std::string& key) const {
  const auto s = values_.find(section);
  if (s == values_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

double ExperimentConfig::number(const std::string& section, const std::string& key) const {
  const ConfigValue* v = find(section, key);
  if (!v) throw Error(ErrorCode::MissingKey, "[" + section + "] " + key);
  if (!std::holds_alternative<double>(*v)) {
    throw Error(ErrorCode::InvalidConfig, "[" + section + "] " + key + " must be a number");
  }
  return std::get<double>(*v);
}

double ExperimentConfig::number_or(const std::string& section, const std::string& key,
                                   double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

std::size_t ExperimentConfig::count(const std::string& section, const std::string& key) const {
  const double v = number(section, key);
  if (v < 0.0 || v != std::floor(v) || v > 1e9) {
    throw Error(ErrorCode::InvalidConfig,
                "[" + section + "] " + key + " must be a whole nonnegative number");
  }
  return static_cast<std::size_t>(v);
}

std::size_t ExperimentConfig::count_or(const std::string& section, const std::string& key,
                                       std::size_t fallback) const {
  return has(section, key) ? count(section, key) : fallback;
}

bool ExperimentConfig::flag_or(const std::string& section, const std::string& key,
                               bool fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (!std::holds_alternative<bool>(*v)) {
    throw Error(ErrorCode::InvalidConfig, "[" + section + "] " + key + " must be true or false");
  }
  return std::get<bool>(*v);
}

ModelParams ExperimentConfig::model() const {
  return validate_params(number("model", "p"), number("model", "q"), number_or("model", "A", 1.0),
                         number_or("model", "B", 1.0), number_or("model", "K", 1.0));
}

Grid1D ExperimentConfig::grid() const { return Grid1D(number("grid", "L"), count("grid", "n")); }

SolverConfig ExperimentConfig::solver() const {
  SolverConfig c;
  c.theta = number_or("solver", "theta", c.theta);
  c.dt0 = number_or("solver", "dt0", c.dt0);
  c.sigma = number_or("solver", "sigma", c.sigma);
  c.blowup_threshold = number_or("solver", "blowup_threshold", c.blowup_threshold);
  c.decay_threshold = number_or("solver", "decay_threshold", c.decay_threshold);
  c.t_max = number_or("solver", "t_max", c.t_max);
  c.snapshot_interval = number_or("solver", "snapshot_interval", c.snapshot_interval);
  c.validate();
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++lineno;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(lineno, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (!vocabulary().contains(name)) {
        throw Error(ErrorCode::UnknownKey, "line " + std::to_string(lineno) + ": section [" +
                                               name + "]");
      }
      section = name;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view raw = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    if (section.empty()) throw ParseError(lineno, "key '" + key + "' outside any section");
    if (!vocabulary().at(section).contains(key)) {
      throw Error(ErrorCode::UnknownKey,
                  "line " + std::to_string(lineno) + ": [" + section + "] " + key);
    }
    const auto value = parse_value(raw);
    if (!value) {
      throw ParseError(lineno, "cannot parse '" + std::string(raw) + "' as a number or boolean");
    }
    if (!seen.insert({section, key}).second) {
      throw ParseError(lineno, "duplicate key '" + key + "'");
    }
    cfg.set(section, key, *value);
  }
  return cfg;
}

}  // namespace fkpp
