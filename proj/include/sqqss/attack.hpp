#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sqqss/protocol.hpp"

namespace sqqss {

/// Detection probabilities for one intercepted photon after the 50-50
/// beamsplitter that routes it to the x-basis or y-basis analyzer.
struct PerPhotonProbs {
  double p_plus_x = 0.25;
  double p_minus_x = 0.25;
  double p_plus_y = 0.25;
  double p_minus_y = 0.25;

  double sum() const { return p_plus_x + p_minus_x + p_plus_y + p_minus_y; }
};

/// Photon tallies in the +x, -x, +y, -y detectors for one pulse.
struct DetectorCounts {
  std::uint64_t i = 0;  // +x
  std::uint64_t j = 0;  // -x
  std::uint64_t k = 0;  // +y
  std::uint64_t l = 0;  // -y
};

/// Eve guesses the secret bit from the detector with the most counts:
/// +x or +y reads as 0, -x or -y reads as 1, ties are broken uniformly at
/// random among the tying detectors. `reversal` inverts every guess, which
/// restores full success when the source asymmetry favors the minus side
/// (a^2 < 1/2).
struct EveStrategy {
  bool reversal = false;
};

/// Per-photon detector marginals seen by a photon-number-splitting
/// eavesdropper tapping the channel after the sender's phase shift. The
/// idler is never measured, so the visibility V drops out; for the
/// entanglement-based variant the marginal is (1/4, 1/4, 1/4, 1/4)
/// independent of a^2 and phase.
PerPhotonProbs per_photon_probs(ProtocolVariant variant, double a_sq,
                                double sender_phase);

/// Eve's guess for one pulse. All-zero counts guess uniformly at random.
int guess_bit(const DetectorCounts& counts, const EveStrategy& strategy,
              std::mt19937_64& rng);

/// Exact probability that Eve's guess is right when she detects exactly n
/// photons: full enumeration of the multinomial count law with fractional
/// credit for ties. Log-domain terms with compensated summation; the result
/// is independent of worker count.
double eve_success_exact(const PerPhotonProbs& probs, int n,
                         const EveStrategy& strategy = {});

/// Closed-form success bookkeeping built from restricted enumerations of
/// strict-maximum and tie events.
struct ClosedFormResult {
  double full;     // includes two- and three-way tie corrections
  double large_n;  // neglects ties: (1 + p_i - p_j) / 2
};
ClosedFormResult eve_success_closedform(const PerPhotonProbs& probs, int n);

struct McOptions {
  /// Bernoulli thinning applied to each pulse: the probability that a
  /// nominally available photon actually reaches a detector. 1 means Eve
  /// detects exactly n photons.
  double pickoff_fraction = 1.0;
  /// Draw each pulse size from Poisson(n) instead of using n exactly.
  bool poisson_pulse = false;
  int workers = 0;  // 0 = auto; the estimate is worker-count invariant
};

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t zero_count_trials = 0;  // pulses where no photon arrived
};

/// Monte Carlo estimate of Eve's success rate: samples detector counts per
/// trial, applies the guessing strategy, and reports the mean with its
/// binomial standard error. Reproducible per seed.
McResult eve_success_montecarlo(const PerPhotonProbs& probs, int n,
                                std::uint64_t trials, std::uint64_t seed,
                                const EveStrategy& strategy = {},
                                const McOptions& opts = {});

/// Eve watches publicly checked runs to decide whether to reverse her
/// guessing: she simulates `calibration_runs` pulses, compares her guesses
/// with the disclosed bits, and reverses when she was wrong more than half
/// the time.
EveStrategy calibrate_reversal(const PerPhotonProbs& probs, int n,
                               int calibration_runs, std::uint64_t seed);

enum class SweepMode { Exact, MonteCarlo, Both };

struct SweepRow {
  double a_sq = 0.5;
  int n = 0;
  double p_success_exact;  // NaN unless mode covers exact
  double p_success_mc;     // NaN unless mode covers Monte Carlo
  double mc_std_error;     // NaN unless mode covers Monte Carlo
};

/// Success-rate table over an a^2 grid for each photon budget in n_list,
/// rows grouped by n. Grid points below 1/2 are evaluated with the guess
/// reversal enabled, which realizes the mirror symmetry
/// P(1 - a^2) = P(a^2) exactly.
std::vector<SweepRow> sweep_a2(ProtocolVariant variant,
                               std::span<const int> n_list,
                               std::span<const double> a2_grid, SweepMode mode,
                               std::uint64_t mc_trials, std::uint64_t seed);

}  // namespace sqqss
