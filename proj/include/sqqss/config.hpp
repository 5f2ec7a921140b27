#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqqss/attack.hpp"

namespace sqqss {

enum class Preset {
  Fig2Sweep,     // PNS success vs a^2, correlation-based
  Fig3Fidelity,  // per-setting success table + session stats
  Fig5Sweep,     // PNS success vs a^2, entanglement-based
  PurityScan,    // coincidence fringes at idler 0 and 45 degrees
  Session,       // plain secret-sharing session
  Cheater,       // intercept-resend cheater session
  Custom         // run the attack sweep with the config exactly as given
};

/// Thrown on malformed config files or out-of-range fields. `line` is the
/// 1-based config file line (0 when the error is not tied to a file) and
/// `key` names the offending field when known.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line_no = 0, std::string key_name = "")
      : std::runtime_error(msg), line(line_no), key(std::move(key_name)) {}
  int line;
  std::string key;
};

/// a^2 in {0.500, 0.525, ..., 1.000}, the plotting grid for the sweeps.
std::vector<double> default_a2_grid();

struct ExperimentConfig {
  Preset preset = Preset::Session;

  // source
  double a_sq = 0.5;
  double visibility = 1.0;
  int photons_per_qubit = 100;

  // protocol
  ProtocolVariant variant = ProtocolVariant::EntanglementBased;
  int participants = 3;
  std::uint64_t runs = 100000;
  double check_fraction = 0.2;

  // attack
  std::vector<int> n_list = {10, 25, 50, 100};
  std::vector<double> a2_grid = default_a2_grid();
  std::uint64_t trials = 100000;
  SweepMode mode = SweepMode::Both;

  std::uint64_t seed = 1;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

/// Defaults tuned per preset (e.g. fig3_fidelity starts from the dephased
/// source whose purity matches the calibration scan).
ExperimentConfig default_config(Preset preset);

std::string preset_name(Preset preset);
Preset parse_preset(const std::string& name);
std::string variant_name(ProtocolVariant variant);
ProtocolVariant parse_variant(const std::string& name);
std::string mode_name(SweepMode mode);
SweepMode parse_mode(const std::string& name);

/// Range-checks every field; throws ConfigError naming the field.
void validate_config(const ExperimentConfig& config);

/// Plain-text key=value format: one pair per line, '#' comments, blank
/// lines ignored. Unknown keys and unparsable values raise ConfigError
/// with the line number and key. Missing keys keep their defaults.
ExperimentConfig load_config(const std::string& path);

/// Writes every field; load_config(save_config(c)) == c.
void save_config(const ExperimentConfig& config, const std::string& path);

}  // namespace sqqss
