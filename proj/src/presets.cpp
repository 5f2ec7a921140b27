#include "sqqss/presets.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "sqqss/csv.hpp"
#include "sqqss/protocol.hpp"

namespace sqqss {

namespace {

template <typename... Args>
std::string strf(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

SourceModel source_from(const ExperimentConfig& cfg) {
  SourceModel model;
  model.a_sq = cfg.a_sq;
  model.visibility = cfg.visibility;
  model.photons_per_qubit = cfg.photons_per_qubit;
  return model;
}

std::string session_line(const SessionStats& stats) {
  return strf(
      "runs=%llu valid=%llu checked=%llu sift_fraction=%.4f error_rate=%.4f "
      "fidelity=%.4f",
      static_cast<unsigned long long>(stats.runs_total),
      static_cast<unsigned long long>(stats.runs_valid),
      static_cast<unsigned long long>(stats.runs_checked),
      stats.sift_fraction, stats.error_rate, stats.fidelity);
}

std::vector<CsvRow> session_rows(const SessionStats& stats) {
  return {{std::to_string(stats.runs_total), std::to_string(stats.runs_valid),
           std::to_string(stats.runs_checked),
           format_double(stats.sift_fraction), format_double(stats.error_rate),
           format_double(stats.fidelity)}};
}

const std::vector<std::string> kSessionHeader = {
    "runs_total", "runs_valid",  "runs_checked",
    "sift_fraction", "error_rate", "fidelity"};

PresetOutput sweep_preset(const ExperimentConfig& cfg, ProtocolVariant variant,
                          const std::string& path) {
  const std::vector<SweepRow> rows =
      sweep_a2(variant, cfg.n_list, cfg.a2_grid, cfg.mode, cfg.trials,
               cfg.seed);
  const std::vector<std::string> header = {
      "a_sq", "n", "p_success_exact", "p_success_mc", "mc_stderr"};
  std::vector<CsvRow> cells;
  cells.reserve(rows.size());
  for (const SweepRow& r : rows)
    cells.push_back({format_double(r.a_sq), std::to_string(r.n),
                     format_double(r.p_success_exact),
                     format_double(r.p_success_mc),
                     format_double(r.mc_std_error)});
  emit_csv(path, header, cells);

  PresetOutput out;
  out.csv_path = path;
  out.summary = strf("%s (%s): %zu rows -> %s\n",
                     preset_name(cfg.preset).c_str(),
                     variant_name(variant).c_str(), rows.size(), path.c_str());
  const std::size_t per_n = cfg.a2_grid.size();
  for (std::size_t block = 0; block * per_n < rows.size(); ++block) {
    const SweepRow& first = rows[block * per_n];
    const SweepRow& last = rows[block * per_n + per_n - 1];
    const bool exact = cfg.mode != SweepMode::MonteCarlo;
    const double lo = exact ? first.p_success_exact : first.p_success_mc;
    const double hi = exact ? last.p_success_exact : last.p_success_mc;
    out.summary += strf("  n=%d: success %.6f at a_sq=%g, %.6f at a_sq=%g\n",
                        first.n, lo, first.a_sq, hi, last.a_sq);
  }
  return out;
}

PresetOutput fidelity_preset(const ExperimentConfig& cfg,
                             const std::string& path) {
  if (cfg.participants > 6)
    throw ConfigError(
        "key 'participants': the per-setting table enumerates all phase "
        "tuples and needs participants <= 6",
        0, "participants");
  const SourceModel model = source_from(cfg);
  const int n = cfg.participants;

  std::vector<std::string> header;
  for (int j = 1; j <= n; ++j) header.push_back(strf("phase_%d_deg", j));
  header.push_back("p_success_exact");

  std::vector<CsvRow> cells;
  double success_sum = 0.0;
  std::uint64_t tuples = 1;
  for (int j = 0; j < n; ++j) tuples *= 4;
  const auto actions_table = all_phase_actions();
  std::vector<PhaseAction> actions(static_cast<std::size_t>(n));
  for (std::uint64_t t = 0; t < tuples; ++t) {
    std::uint64_t rest = t;
    for (int j = n - 1; j >= 0; --j) {
      actions[static_cast<std::size_t>(j)] = actions_table[rest % 4];
      rest /= 4;
    }
    if (!is_valid_run(cfg.variant, actions, MeasBasis::X)) continue;
    const double p =
        round_success_probability(cfg.variant, model, actions, MeasBasis::X);
    CsvRow row;
    for (const PhaseAction& a : actions)
      row.push_back(
          format_double(a.phase() * 180.0 / std::numbers::pi));
    row.push_back(format_double(p));
    cells.push_back(std::move(row));
    success_sum += p;
  }
  emit_csv(path, header, cells);

  SessionOptions opts;
  opts.check_fraction = cfg.check_fraction;
  const SessionStats stats = run_session(cfg.variant, model, cfg.participants,
                                         cfg.runs, cfg.seed, opts);

  PresetOutput out;
  out.csv_path = path;
  out.summary =
      strf("%s: %zu valid settings -> %s\n", preset_name(cfg.preset).c_str(),
           cells.size(), path.c_str());
  out.summary += strf("  mean exact success over valid settings: %.6f\n",
                      cells.empty() ? 0.0
                                    : success_sum /
                                          static_cast<double>(cells.size()));
  out.summary += "  session: " + session_line(stats) + "\n";
  return out;
}

PresetOutput purity_scan_preset(const ExperimentConfig& cfg,
                                const std::string& path) {
  const SourceModel model = source_from(cfg);
  const std::vector<double> angles = default_scan_angles();
  const std::vector<ScanPoint> at0 = purity_scan(model, 0.0, angles);
  const std::vector<ScanPoint> at45 = purity_scan(model, 45.0, angles);

  const std::vector<std::string> header = {"hwp_angle_deg",
                                           "p_coincidence_idler_0deg",
                                           "p_coincidence_idler_45deg"};
  std::vector<CsvRow> cells;
  cells.reserve(angles.size());
  for (std::size_t idx = 0; idx < angles.size(); ++idx)
    cells.push_back({format_double(angles[idx]),
                     format_double(at0[idx].coincidence_probability),
                     format_double(at45[idx].coincidence_probability)});
  emit_csv(path, header, cells);

  const double vis0 = fringe_visibility(at0);
  const double vis45 = fringe_visibility(at45);
  PresetOutput out;
  out.csv_path = path;
  out.summary = strf("%s: %zu angles -> %s\n", preset_name(cfg.preset).c_str(),
                     angles.size(), path.c_str());
  out.summary += strf("  visibility: %.6f at idler 0 deg, %.6f at 45 deg\n",
                      vis0, vis45);
  out.summary += strf("  inferred purity from 45 deg fringe: %.6f\n",
                      purity_from_visibility(vis45));
  return out;
}

PresetOutput session_preset(const ExperimentConfig& cfg,
                            const std::string& path, bool cheater) {
  const SourceModel model = source_from(cfg);
  SessionOptions opts;
  opts.check_fraction = cfg.check_fraction;
  const SessionStats stats =
      cheater ? simulate_cheater_intercept_resend(cfg.variant, model,
                                                  cfg.participants, cfg.runs,
                                                  cfg.seed, CheaterSpec{}, opts)
              : run_session(cfg.variant, model, cfg.participants, cfg.runs,
                            cfg.seed, opts);
  emit_csv(path, kSessionHeader, session_rows(stats));

  PresetOutput out;
  out.csv_path = path;
  out.summary = strf("%s (%s, participants=%d) -> %s\n",
                     preset_name(cfg.preset).c_str(),
                     variant_name(cfg.variant).c_str(), cfg.participants,
                     path.c_str());
  out.summary += "  " + session_line(stats) + "\n";
  if (cheater)
    out.summary +=
        "  error_rate is taken over the checked subset of valid runs\n";
  return out;
}

}  // namespace

PresetOutput run_preset(const ExperimentConfig& cfg,
                        const std::string& out_path) {
  validate_config(cfg);
  const std::string path =
      out_path.empty() ? preset_name(cfg.preset) + ".csv" : out_path;
  switch (cfg.preset) {
    case Preset::Fig2Sweep:
      return sweep_preset(cfg, ProtocolVariant::CorrelationBased, path);
    case Preset::Fig5Sweep:
      return sweep_preset(cfg, ProtocolVariant::EntanglementBased, path);
    case Preset::Custom:
      return sweep_preset(cfg, cfg.variant, path);
    case Preset::Fig3Fidelity:
      return fidelity_preset(cfg, path);
    case Preset::PurityScan:
      return purity_scan_preset(cfg, path);
    case Preset::Session:
      return session_preset(cfg, path, false);
    case Preset::Cheater:
      return session_preset(cfg, path, true);
  }
  throw ConfigError("unrepresentable preset");
}

}  // namespace sqqss
