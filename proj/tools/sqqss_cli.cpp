#include <cstdint>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqqss/attack.hpp"
#include "sqqss/config.hpp"
#include "sqqss/csv.hpp"
#include "sqqss/presets.hpp"

namespace {

using namespace sqqss;

/// Options shared by the config-driven subcommands. A flag given on the
/// command line overrides the corresponding field of the loaded config.
struct ConfigFlags {
  std::string config_path;
  std::string out_path;
  std::string variant;
  std::string mode;
  double a_sq = 0.5;
  double visibility = 1.0;
  double check_fraction = 0.2;
  int photons_per_qubit = 100;
  int participants = 3;
  std::uint64_t runs = 100000;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  std::vector<int> n_list;
  std::vector<double> a2_grid;

  CLI::Option* o_a_sq = nullptr;
  CLI::Option* o_visibility = nullptr;
  CLI::Option* o_check = nullptr;
  CLI::Option* o_photons = nullptr;
  CLI::Option* o_participants = nullptr;
  CLI::Option* o_variant = nullptr;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_runs = nullptr;
  CLI::Option* o_trials = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_n_list = nullptr;
  CLI::Option* o_a2_grid = nullptr;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path,
                    "key=value config file to start from");
    sub->add_option("--out", out_path, "output CSV path");
    o_a_sq = sub->add_option("--a-sq", a_sq, "|HH> weight a^2 of the source");
    o_visibility = sub->add_option("--visibility", visibility,
                                   "off-diagonal coherence V of the source");
    o_photons = sub->add_option("--photons-per-qubit", photons_per_qubit,
                                "pulse size per qubit");
    o_variant =
        sub->add_option("--variant", variant, "correlation|entanglement|sendback");
    o_participants = sub->add_option("--participants", participants,
                                     "participant count N, sender included");
    o_runs = sub->add_option("--runs", runs, "protocol rounds per session");
    o_check = sub->add_option("--check-fraction", check_fraction,
                              "fraction of valid runs flagged for checking");
    o_n_list = sub->add_option("--n-list", n_list,
                               "photon budgets for the sweep (comma separated)")
                   ->delimiter(',');
    o_a2_grid = sub->add_option("--a2-grid", a2_grid,
                                "a^2 grid for the sweep (comma separated)")
                    ->delimiter(',');
    o_trials = sub->add_option("--trials", trials, "Monte Carlo trials");
    o_mode = sub->add_option("--mode", mode, "exact|mc|both");
    o_seed = sub->add_option("--seed", seed, "64-bit master seed");
  }

  ExperimentConfig build(Preset preset) const {
    ExperimentConfig cfg = config_path.empty() ? default_config(preset)
                                               : load_config(config_path);
    cfg.preset = preset;
    if (o_a_sq->count()) cfg.a_sq = a_sq;
    if (o_visibility->count()) cfg.visibility = visibility;
    if (o_photons->count()) cfg.photons_per_qubit = photons_per_qubit;
    if (o_variant->count()) cfg.variant = parse_variant(variant);
    if (o_participants->count()) cfg.participants = participants;
    if (o_runs->count()) cfg.runs = runs;
    if (o_check->count()) cfg.check_fraction = check_fraction;
    if (o_n_list->count()) cfg.n_list = n_list;
    if (o_a2_grid->count()) cfg.a2_grid = a2_grid;
    if (o_trials->count()) cfg.trials = trials;
    if (o_mode->count()) cfg.mode = parse_mode(mode);
    if (o_seed->count()) cfg.seed = seed;
    return cfg;
  }
};

struct AttackFlags {
  std::string variant = "correlation";
  std::string out_path;
  double a_sq = 0.6;
  double phase_deg = 0.0;
  int n = 100;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;

  void attach(CLI::App* sub) {
    sub->add_option("--variant", variant, "correlation|entanglement|sendback");
    sub->add_option("--a-sq", a_sq, "|HH> weight a^2 of the source");
    sub->add_option("--phase-deg", phase_deg, "sender phase in degrees");
    sub->add_option("--n", n, "photons detected by the eavesdropper per qubit");
    sub->add_option("--trials", trials, "Monte Carlo trials");
    sub->add_option("--seed", seed, "64-bit master seed");
    sub->add_option("--out", out_path, "optional one-row CSV path");
  }
};

int run_attack(const AttackFlags& flags) {
  const ProtocolVariant variant = parse_variant(flags.variant);
  const double phase = flags.phase_deg * std::numbers::pi / 180.0;
  const PerPhotonProbs probs = per_photon_probs(variant, flags.a_sq, phase);
  const EveStrategy strategy{flags.a_sq < 0.5};
  // The closed form is written for the plus-favoring arrangement; mirror
  // the detector labels when the guess is reversed.
  const PerPhotonProbs closed_probs =
      strategy.reversal ? PerPhotonProbs{probs.p_minus_x, probs.p_plus_x,
                                         probs.p_minus_y, probs.p_plus_y}
                        : probs;
  const double exact = eve_success_exact(probs, flags.n, strategy);
  const ClosedFormResult closed =
      eve_success_closedform(closed_probs, flags.n);
  const McResult mc =
      eve_success_montecarlo(probs, flags.n, flags.trials, flags.seed,
                             strategy);

  char line[256];
  std::snprintf(line, sizeof(line),
                "per-photon probs: +x=%.6f -x=%.6f +y=%.6f -y=%.6f\n",
                probs.p_plus_x, probs.p_minus_x, probs.p_plus_y,
                probs.p_minus_y);
  std::cout << line;
  std::snprintf(line, sizeof(line),
                "exact=%.9f closed_full=%.9f closed_large_n=%.9f\n", exact,
                closed.full, closed.large_n);
  std::cout << line;
  std::snprintf(line, sizeof(line), "mc=%.6f +- %.6f (trials=%llu)\n",
                mc.estimate, mc.std_error,
                static_cast<unsigned long long>(mc.trials));
  std::cout << line;

  if (!flags.out_path.empty()) {
    const std::vector<std::string> header = {
        "a_sq",       "n",           "phase_deg",     "p_plus_x",
        "p_minus_x",  "p_plus_y",    "p_minus_y",     "p_exact",
        "p_closed_full", "p_closed_large_n", "p_mc",  "mc_stderr"};
    const std::vector<CsvRow> rows = {
        {format_double(flags.a_sq), std::to_string(flags.n),
         format_double(flags.phase_deg), format_double(probs.p_plus_x),
         format_double(probs.p_minus_x), format_double(probs.p_plus_y),
         format_double(probs.p_minus_y), format_double(exact),
         format_double(closed.full), format_double(closed.large_n),
         format_double(mc.estimate), format_double(mc.std_error)}};
    emit_csv(flags.out_path, header, rows);
    std::cout << "wrote " << flags.out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-qubit secret sharing over polarization-entangled "
               "photon pairs: sessions, eavesdropping analysis, calibration"};
  app.require_subcommand(1);

  ConfigFlags preset_flags, sweep_flags, session_flags, scan_flags;
  AttackFlags attack_flags;
  std::string preset_arg;
  bool cheater_flag = false;

  CLI::App* cmd_preset =
      app.add_subcommand("preset", "run a named experiment preset");
  cmd_preset
      ->add_option("name", preset_arg,
                   "fig2_sweep|fig3_fidelity|fig5_sweep|purity_scan|session|"
                   "cheater|custom")
      ->required();
  preset_flags.attach(cmd_preset);

  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "eavesdropper success over an a^2 grid, CSV output");
  sweep_flags.attach(cmd_sweep);

  CLI::App* cmd_session =
      app.add_subcommand("session", "simulate a secret-sharing session");
  session_flags.attach(cmd_session);
  cmd_session->add_flag("--cheater", cheater_flag,
                        "insert an intercept-resend cheater at recipient 2");

  CLI::App* cmd_scan = app.add_subcommand(
      "purity-scan", "coincidence fringes with the idler at 0 and 45 degrees");
  scan_flags.attach(cmd_scan);

  CLI::App* cmd_attack = app.add_subcommand(
      "attack", "single-point eavesdropper diagnostics (exact, closed form, MC)");
  attack_flags.attach(cmd_attack);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_preset->parsed()) {
      const ExperimentConfig cfg =
          preset_flags.build(parse_preset(preset_arg));
      const PresetOutput out = run_preset(cfg, preset_flags.out_path);
      std::cout << out.summary;
    } else if (cmd_sweep->parsed()) {
      ExperimentConfig cfg = sweep_flags.build(Preset::Custom);
      if (!sweep_flags.o_variant->count() && sweep_flags.config_path.empty())
        cfg.variant = ProtocolVariant::CorrelationBased;
      const std::string out_path =
          sweep_flags.out_path.empty() ? "sweep.csv" : sweep_flags.out_path;
      const PresetOutput out = run_preset(cfg, out_path);
      std::cout << out.summary;
    } else if (cmd_session->parsed()) {
      const ExperimentConfig cfg = session_flags.build(
          cheater_flag ? Preset::Cheater : Preset::Session);
      const PresetOutput out = run_preset(cfg, session_flags.out_path);
      std::cout << out.summary;
    } else if (cmd_scan->parsed()) {
      const ExperimentConfig cfg = scan_flags.build(Preset::PurityScan);
      const PresetOutput out = run_preset(cfg, scan_flags.out_path);
      std::cout << out.summary;
    } else if (cmd_attack->parsed()) {
      return run_attack(attack_flags);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
