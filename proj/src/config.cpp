#include "sqqss/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "sqqss/source.hpp"

namespace sqqss {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& value, const std::string& key) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ConfigError("key '" + key + "': '" + value + "' is not a number", 0,
                      key);
  return v;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  if (value.find('-') != std::string::npos)
    throw ConfigError("key '" + key + "': '" + value + "' must be >= 0", 0,
                      key);
  const char* begin = value.c_str();
  char* end = nullptr;
  const std::uint64_t v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ConfigError(
        "key '" + key + "': '" + value + "' is not a non-negative integer", 0,
        key);
  return v;
}

int parse_int(const std::string& value, const std::string& key) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ConfigError("key '" + key + "': '" + value + "' is not an integer",
                      0, key);
  return static_cast<int>(v);
}

std::string render17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value) {
  if (key == "preset") {
    cfg.preset = parse_preset(value);
  } else if (key == "a_sq") {
    cfg.a_sq = parse_double(value, key);
  } else if (key == "visibility") {
    cfg.visibility = parse_double(value, key);
  } else if (key == "photons_per_qubit") {
    cfg.photons_per_qubit = parse_int(value, key);
  } else if (key == "variant") {
    cfg.variant = parse_variant(value);
  } else if (key == "participants") {
    cfg.participants = parse_int(value, key);
  } else if (key == "runs") {
    cfg.runs = parse_u64(value, key);
  } else if (key == "check_fraction") {
    cfg.check_fraction = parse_double(value, key);
  } else if (key == "n_list") {
    cfg.n_list.clear();
    for (const auto& item : split(value, ','))
      cfg.n_list.push_back(parse_int(item, key));
  } else if (key == "a2_grid") {
    cfg.a2_grid.clear();
    for (const auto& item : split(value, ','))
      cfg.a2_grid.push_back(parse_double(item, key));
  } else if (key == "trials") {
    cfg.trials = parse_u64(value, key);
  } else if (key == "mode") {
    cfg.mode = parse_mode(value);
  } else if (key == "seed") {
    cfg.seed = parse_u64(value, key);
  } else {
    throw ConfigError("unknown key '" + key + "'", 0, key);
  }
}

}  // namespace

std::vector<double> default_a2_grid() {
  std::vector<double> grid;
  for (int step = 0; step <= 20; ++step) grid.push_back(0.5 + 0.025 * step);
  return grid;
}

ExperimentConfig default_config(Preset preset) {
  ExperimentConfig cfg;
  cfg.preset = preset;
  switch (preset) {
    case Preset::Fig2Sweep:
      cfg.variant = ProtocolVariant::CorrelationBased;
      break;
    case Preset::Fig5Sweep:
      cfg.variant = ProtocolVariant::EntanglementBased;
      break;
    case Preset::Fig3Fidelity:
      cfg.variant = ProtocolVariant::EntanglementBased;
      cfg.visibility = visibility_from_purity(0.78);
      break;
    case Preset::PurityScan:
      cfg.visibility = visibility_from_purity(0.78);
      break;
    default:
      break;
  }
  return cfg;
}

std::string preset_name(Preset preset) {
  switch (preset) {
    case Preset::Fig2Sweep: return "fig2_sweep";
    case Preset::Fig3Fidelity: return "fig3_fidelity";
    case Preset::Fig5Sweep: return "fig5_sweep";
    case Preset::PurityScan: return "purity_scan";
    case Preset::Session: return "session";
    case Preset::Cheater: return "cheater";
    case Preset::Custom: return "custom";
  }
  throw ConfigError("unrepresentable preset");
}

Preset parse_preset(const std::string& name) {
  for (const Preset p :
       {Preset::Fig2Sweep, Preset::Fig3Fidelity, Preset::Fig5Sweep,
        Preset::PurityScan, Preset::Session, Preset::Cheater, Preset::Custom})
    if (preset_name(p) == name) return p;
  throw ConfigError("unknown preset '" + name + "'", 0, "preset");
}

std::string variant_name(ProtocolVariant variant) {
  switch (variant) {
    case ProtocolVariant::CorrelationBased: return "correlation";
    case ProtocolVariant::EntanglementBased: return "entanglement";
    case ProtocolVariant::SendBack: return "sendback";
  }
  throw ConfigError("unrepresentable variant");
}

ProtocolVariant parse_variant(const std::string& name) {
  for (const ProtocolVariant v :
       {ProtocolVariant::CorrelationBased, ProtocolVariant::EntanglementBased,
        ProtocolVariant::SendBack})
    if (variant_name(v) == name) return v;
  throw ConfigError("unknown variant '" + name + "'", 0, "variant");
}

std::string mode_name(SweepMode mode) {
  switch (mode) {
    case SweepMode::Exact: return "exact";
    case SweepMode::MonteCarlo: return "mc";
    case SweepMode::Both: return "both";
  }
  throw ConfigError("unrepresentable mode");
}

SweepMode parse_mode(const std::string& name) {
  for (const SweepMode m :
       {SweepMode::Exact, SweepMode::MonteCarlo, SweepMode::Both})
    if (mode_name(m) == name) return m;
  throw ConfigError("unknown mode '" + name + "'", 0, "mode");
}

void validate_config(const ExperimentConfig& cfg) {
  const auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError("key '" + key + "': " + what, 0, key);
  };
  if (!(cfg.a_sq >= 0.0 && cfg.a_sq <= 1.0)) fail("a_sq", "must lie in [0, 1]");
  if (!(cfg.visibility >= 0.0 && cfg.visibility <= 1.0))
    fail("visibility", "must lie in [0, 1]");
  if (cfg.photons_per_qubit < 1) fail("photons_per_qubit", "must be >= 1");
  if (cfg.participants < 2) fail("participants", "must be >= 2");
  if (cfg.runs < 1) fail("runs", "must be >= 1");
  if (!(cfg.check_fraction >= 0.0 && cfg.check_fraction <= 1.0))
    fail("check_fraction", "must lie in [0, 1]");
  if (cfg.n_list.empty()) fail("n_list", "must not be empty");
  for (const int n : cfg.n_list)
    if (n < 1) fail("n_list", "entries must be >= 1");
  if (cfg.a2_grid.empty()) fail("a2_grid", "must not be empty");
  for (const double a2 : cfg.a2_grid)
    if (!(a2 >= 0.0 && a2 <= 1.0)) fail("a2_grid", "entries must lie in [0, 1]");
  if (cfg.trials < 1) fail("trials", "must be >= 1");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ExperimentConfig cfg;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto comment = raw.find('#');
    if (comment != std::string::npos) raw.erase(comment);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                            ": expected key=value, got '" + stripped + "'",
                        line_no);
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key",
                        line_no);
    try {
      apply_key(cfg, key, value);
    } catch (const ConfigError& err) {
      throw ConfigError(
          "line " + std::to_string(line_no) + ": " + err.what(), line_no,
          err.key.empty() ? key : err.key);
    }
  }
  validate_config(cfg);
  return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  const auto join_ints = [](const std::vector<int>& vs) {
    std::string s;
    for (std::size_t idx = 0; idx < vs.size(); ++idx) {
      if (idx) s += ',';
      s += std::to_string(vs[idx]);
    }
    return s;
  };
  const auto join_doubles = [](const std::vector<double>& vs) {
    std::string s;
    for (std::size_t idx = 0; idx < vs.size(); ++idx) {
      if (idx) s += ',';
      s += render17(vs[idx]);
    }
    return s;
  };
  out << "preset=" << preset_name(cfg.preset) << '\n';
  out << "a_sq=" << render17(cfg.a_sq) << '\n';
  out << "visibility=" << render17(cfg.visibility) << '\n';
  out << "photons_per_qubit=" << cfg.photons_per_qubit << '\n';
  out << "variant=" << variant_name(cfg.variant) << '\n';
  out << "participants=" << cfg.participants << '\n';
  out << "runs=" << cfg.runs << '\n';
  out << "check_fraction=" << render17(cfg.check_fraction) << '\n';
  out << "n_list=" << join_ints(cfg.n_list) << '\n';
  out << "a2_grid=" << join_doubles(cfg.a2_grid) << '\n';
  out << "trials=" << cfg.trials << '\n';
  out << "mode=" << mode_name(cfg.mode) << '\n';
  out << "seed=" << cfg.seed << '\n';
  out.flush();
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace sqqss
