#pragma once

// Experiment configuration.
//
// Grammar, one statement per line:
//   # comment (also after a value)
//   experiment = mix              (optional, before the first section)
//   [section]                     model | weights | run | output
//   key = value                   string, integer, real, true/false
//   key = [v1, v2, ...]           list of numbers
// Keys form a closed schema; anything else is rejected with its line number.

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dlgibbs/error.hpp"

namespace dlgibbs {

enum class ValueType { Str, Int, Real, Bool, RealList, IntList };

using ConfigValue = std::variant<std::string, long long, double, bool, std::vector<double>>;

struct KeySpec {
  std::string_view section;
  std::string_view key;
  ValueType type;
};

// Order here is the serialization order.
inline constexpr KeySpec kConfigSchema[] = {
    {"model", "kind", ValueType::Str},
    {"model", "n", ValueType::Int},
    {"model", "seed", ValueType::Int},
    {"model", "seeds", ValueType::IntList},
    {"model", "couplings", ValueType::Str},
    {"model", "normalize", ValueType::Bool},
    {"weights", "kind", ValueType::Str},
    {"weights", "q_profile", ValueType::Str},
    {"weights", "q_width", ValueType::Real},
    {"weights", "q_table", ValueType::RealList},
    {"weights", "weight_exponent", ValueType::Real},
    {"weights", "tanh_scale", ValueType::Real},
    {"weights", "tanh_times_beta", ValueType::Bool},
    {"weights", "kappa_cutoff", ValueType::Real},
    {"run", "beta", ValueType::Real},
    {"run", "betas", ValueType::RealList},
    {"run", "delta", ValueType::Real},
    {"run", "eps", ValueType::Real},
    {"run", "k_max", ValueType::Int},
    {"run", "ell_min", ValueType::Int},
    {"run", "ell_max", ValueType::Int},
    {"run", "alpha", ValueType::Real},
    {"run", "order", ValueType::Str},
    {"run", "random_states", ValueType::Int},
    {"run", "contraction_trials", ValueType::Int},
    {"run", "projector_mode", ValueType::Str},
    {"run", "backend", ValueType::Str},
    {"run", "dbetas", ValueType::RealList},
    {"run", "sk_exponent", ValueType::Real},
    {"run", "gate_constant", ValueType::Real},
    {"run", "runtime_constant", ValueType::Real},
    {"run", "workers", ValueType::Int},
    {"output", "csv", ValueType::Str},
    {"output", "json", ValueType::Str},
};

inline constexpr std::string_view kExperiments[] = {"mix", "project", "parent", "anneal", "overlap", "estimate"};

inline bool is_experiment(std::string_view s) {
  for (auto e : kExperiments)
    if (e == s) return true;
  return false;
}

inline const KeySpec* find_key(std::string_view section, std::string_view key) {
  for (const auto& k : kConfigSchema)
    if (k.section == section && k.key == key) return &k;
  return nullptr;
}

struct ExperimentConfig {
  std::string experiment;                      // may be empty until the CLI fills it in
  std::map<std::string, ConfigValue> values;   // "section.key" -> value

  bool has(const std::string& dotted) const { return values.count(dotted) > 0; }

  std::string str(const std::string& k, std::string fallback = {}) const {
    auto it = values.find(k);
    return it == values.end() ? fallback : std::get<std::string>(it->second);
  }
  long long integer(const std::string& k, long long fallback = 0) const {
    auto it = values.find(k);
    return it == values.end() ? fallback : std::get<long long>(it->second);
  }
  double real(const std::string& k, double fallback = 0.0) const {
    auto it = values.find(k);
    return it == values.end() ? fallback : std::get<double>(it->second);
  }
  bool boolean(const std::string& k, bool fallback = false) const {
    auto it = values.find(k);
    return it == values.end() ? fallback : std::get<bool>(it->second);
  }
  std::vector<double> list(const std::string& k) const {
    auto it = values.find(k);
    return it == values.end() ? std::vector<double>{} : std::get<std::vector<double>>(it->second);
  }
  void set(const std::string& k, ConfigValue v) { values[k] = std::move(v); }
  void erase(const std::string& k) { values.erase(k); }

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string at_line(int line) { return "line " + std::to_string(line) + ": "; }

inline double parse_real(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw Error(Errc::ParseError, "cli-harness", at_line(line) + "not a number: '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s, int line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw Error(Errc::ParseError, "cli-harness", at_line(line) + "not an integer: '" + s + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& s, int line, bool integers) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw Error(Errc::ParseError, "cli-harness", at_line(line) + "expected a bracketed list");
  }
  std::vector<double> out;
  const std::string body = trim(std::string_view(s).substr(1, s.size() - 2));
  if (body.empty()) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    out.push_back(integers ? static_cast<double>(parse_int(item, line)) : parse_real(item, line));
  }
  return out;
}

inline ConfigValue parse_value(ValueType type, const std::string& raw, int line) {
  std::string s = raw;
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  switch (type) {
    case ValueType::Str:
      if (s.empty()) throw Error(Errc::ParseError, "cli-harness", at_line(line) + "empty value");
      return s;
    case ValueType::Int: return parse_int(s, line);
    case ValueType::Real: return parse_real(s, line);
    case ValueType::Bool:
      if (s == "true") return true;
      if (s == "false") return false;
      throw Error(Errc::ParseError, "cli-harness", at_line(line) + "expected true or false");
    case ValueType::RealList: return parse_list(s, line, false);
    case ValueType::IntList: return parse_list(s, line, true);
  }
  return s;
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& cfg);

/// Parses and, when the experiment is named in the text, validates.
inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  std::stringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw Error(Errc::ParseError, "cli-harness", detail::at_line(line) + "unterminated section header");
      section = detail::trim(std::string_view(s).substr(1, s.size() - 2));
      if (section != "model" && section != "weights" && section != "run" && section != "output") {
        throw Error(Errc::UnknownKey, "cli-harness", detail::at_line(line) + "unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(Errc::ParseError, "cli-harness", detail::at_line(line) + "expected key = value");
    const std::string key = detail::trim(std::string_view(s).substr(0, eq));
    const std::string value = detail::trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw Error(Errc::ParseError, "cli-harness", detail::at_line(line) + "missing key");
    if (section.empty()) {
      if (key != "experiment") {
        throw Error(Errc::UnknownKey, "cli-harness", detail::at_line(line) + "unknown key '" + key + "' outside a section");
      }
      if (!is_experiment(value)) {
        throw Error(Errc::ParseError, "cli-harness", detail::at_line(line) + "unknown experiment '" + value + "'");
      }
      cfg.experiment = value;
      continue;
    }
    const KeySpec* spec = find_key(section, key);
    if (!spec) {
      throw Error(Errc::UnknownKey, "cli-harness", detail::at_line(line) + "unknown key '" + section + "." + key + "'");
    }
    const std::string dotted = section + "." + key;
    if (cfg.has(dotted)) throw Error(Errc::ParseError, "cli-harness", detail::at_line(line) + "duplicate key '" + dotted + "'");
    cfg.values[dotted] = detail::parse_value(spec->type, value, line);
  }
  if (!cfg.experiment.empty()) validate_config(cfg);
  return cfg;
}

inline void require(const ExperimentConfig& cfg, const std::string& key) {
  if (!cfg.has(key)) throw Error(Errc::MissingKey, "cli-harness", key);
}

inline void require_beta(const ExperimentConfig& cfg) {
  if (!cfg.has("run.beta") && !cfg.has("run.betas")) throw Error(Errc::MissingKey, "cli-harness", "run.beta");
}

/// Required keys per experiment.
inline void validate_config(const ExperimentConfig& cfg) {
  if (!is_experiment(cfg.experiment)) {
    throw Error(Errc::ParseError, "cli-harness", "unknown experiment '" + cfg.experiment + "'");
  }
  require(cfg, "model.kind");
  require(cfg, "model.n");
  const std::string& e = cfg.experiment;
  if (e == "mix") {
    require_beta(cfg);
    require(cfg, "run.k_max");
  } else if (e == "project") {
    require(cfg, "run.ell_max");
  } else if (e == "parent") {
    require_beta(cfg);
  } else if (e == "anneal") {
    require_beta(cfg);
    require(cfg, "run.delta");
  } else if (e == "overlap") {
    require_beta(cfg);
    require(cfg, "run.dbetas");
  } else if (e == "estimate") {
    require_beta(cfg);
    require(cfg, "run.eps");
  }
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  if (!cfg.experiment.empty()) out += "experiment = " + cfg.experiment + "\n";
  std::string_view current;
  for (const auto& spec : kConfigSchema) {
    const std::string dotted = std::string(spec.section) + "." + std::string(spec.key);
    const auto it = cfg.values.find(dotted);
    if (it == cfg.values.end()) continue;
    if (spec.section != current) {
      out += "\n[" + std::string(spec.section) + "]\n";
      current = spec.section;
    }
    out += std::string(spec.key) + " = ";
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::string>) {
            out += v;
          } else if constexpr (std::is_same_v<T, long long>) {
            out += std::to_string(v);
          } else if constexpr (std::is_same_v<T, double>) {
            out += detail::format_real(v);
          } else if constexpr (std::is_same_v<T, bool>) {
            out += v ? "true" : "false";
          } else {
            out += "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
              if (i) out += ", ";
              out += spec.type == ValueType::IntList ? std::to_string(static_cast<long long>(v[i]))
                                                     : detail::format_real(v[i]);
            }
            out += "]";
          }
        },
        it->second);
    out += "\n";
  }
  return out;
}

/// 64-bit FNV-1a, used to tag outputs with the configuration that produced them.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_config(cfg))));
  return buf;
}

}  // namespace dlgibbs
