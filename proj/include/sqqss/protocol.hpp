#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "sqqss/qcore.hpp"
#include "sqqss/source.hpp"

namespace sqqss {

enum class ClassBit { X, Y };

/// One participant's move: a publicly announced class bit plus a private
/// secret (shadow) bit choosing the phase within that class.
struct PhaseAction {
  ClassBit class_bit = ClassBit::X;
  int secret_bit = 0;

  /// {X,0}->0, {X,1}->pi, {Y,0}->pi/2, {Y,1}->3pi/2.
  double phase() const;

  friend bool operator==(const PhaseAction&, const PhaseAction&) = default;
};

/// All four actions, indexed by 2*[class==Y] + secret.
std::span<const PhaseAction> all_phase_actions();

enum class ProtocolVariant {
  CorrelationBased,   // idler gated on |H>, signal rotated H->+x
  EntanglementBased,  // idler gated on |+x>, no signal rotation
  SendBack            // correlation-based chain, photon returned to the
                      // sender who picks the measurement basis
};

/// One protocol round. actions[0] is the sender; outcome_bit is 0 for the
/// plus result and 1 for the minus result of the final measurement.
struct RunRecord {
  std::vector<PhaseAction> actions;
  std::optional<int> outcome_bit;
  bool valid = false;
  MeasBasis measurement_basis = MeasBasis::X;  // sender's choice (SendBack)
};

struct SessionStats {
  std::uint64_t runs_total = 0;
  std::uint64_t runs_valid = 0;
  std::uint64_t runs_checked = 0;
  double sift_fraction = 0.0;
  double error_rate = 0.0;
  double fidelity = 1.0;
};

struct InvalidRun : std::logic_error {
  explicit InvalidRun(const std::string& what) : std::logic_error(what) {}
};

/// Signal state entering the participant chain, conditioned on the idler
/// gate, plus one Bernoulli sample of the coincidence gate itself.
struct PreparedSignal {
  Mat2 state;
  bool gate_accepted;
  double gate_probability;
};

PreparedSignal prepare_signal(ProtocolVariant variant, const SourceModel& model,
                              std::mt19937_64& rng);

/// Parity sifting rule. The main variants keep runs with an even number of
/// class-Y operations; SendBack keeps runs with an even number of class-X
/// operations counting the measurement class.
bool is_valid_run(ProtocolVariant variant, std::span<const PhaseAction> actions,
                  MeasBasis measurement_basis);

/// Final-measurement outcome distribution for a fixed action tuple,
/// computed exactly from the conditional density matrix (no sampling).
BasisProbs round_outcome_distribution(ProtocolVariant variant,
                                      const SourceModel& model,
                                      std::span<const PhaseAction> actions,
                                      MeasBasis measurement_basis = MeasBasis::X);

/// Plays one full round: gate (resampling rejected pairs), N phase shifts,
/// final measurement, sifting flag. For SendBack the measurement basis is
/// drawn uniformly from {x, y}.
RunRecord run_round(ProtocolVariant variant, const SourceModel& model,
                    const std::vector<PhaseAction>& actions,
                    std::mt19937_64& rng);

/// Recovers the sender's secret bit from a valid record:
/// outcome ^ XOR of recipient secret bits ^ (Y-count/2 mod 2), with the
/// Y-count offset against the measurement basis for SendBack. Throws
/// InvalidRun on sifted-out records and on records whose measurement basis
/// cannot decode the accumulated phase (possible for SendBack).
int reconstruct_secret(const RunRecord& record);

/// Probability that reconstruct_secret would recover the sender's bit for
/// this action tuple, computed exactly. Requires a sifting-valid, decodable
/// tuple (throws InvalidRun otherwise).
double round_success_probability(ProtocolVariant variant,
                                 const SourceModel& model,
                                 std::span<const PhaseAction> actions,
                                 MeasBasis measurement_basis = MeasBasis::X);

struct SessionOptions {
  double check_fraction = 0.2;  // fraction of valid runs flagged for checking
  int workers = 0;              // 0 = auto; results are worker-count invariant
};

/// Runs `runs` rounds with uniformly random actions. error_rate counts the
/// valid runs whose reconstruction misses the sender's bit.
SessionStats run_session(ProtocolVariant variant, const SourceModel& model,
                         int participants, std::uint64_t runs,
                         std::uint64_t seed, const SessionOptions& opts = {});

struct CheaterSpec {
  /// Which recipient (1-based participant index, 2..N) intercepts the signal
  /// before applying their own phase.
  int recipient_index = 2;
  enum class BasisPolicy {
    UniformRandom,  // measure in x or y with a fair coin, then resend
    OracleCorrect   // always pick the basis matching the accumulated phase
                    // (diagnostic upper bound; undetectable by construction)
  };
  BasisPolicy policy = BasisPolicy::UniformRandom;
};

/// Intercept-resend cheating session. error_rate and fidelity are computed
/// over the checked subset of valid runs (runs_checked of them).
SessionStats simulate_cheater_intercept_resend(
    ProtocolVariant variant, const SourceModel& model, int participants,
    std::uint64_t runs, std::uint64_t seed, const CheaterSpec& cheater = {},
    const SessionOptions& opts = {});

/// Signal density matrix just before the final measurement, averaged over
/// all four phase choices of every participant whose action is not fixed.
/// With any participant unfixed the result is basis-symmetric: its x- and
/// y-basis outcome probabilities are exactly (1/2, 1/2).
Mat2 premeasure_marginal(ProtocolVariant variant, const SourceModel& model,
                         std::span<const std::optional<PhaseAction>> fixed);

// -- purity calibration fringe scan -------------------------------------------

struct ScanPoint {
  double hwp_angle_deg;
  double coincidence_probability;
};

/// Coincidence probability vs. signal half-wave-plate angle with the idler
/// polarizer fixed at idler_angle_deg (0 or 45 in the calibration). The HWP
/// at angle t projects the signal onto linear polarization at 2t.
std::vector<ScanPoint> purity_scan(const SourceModel& model,
                                   double idler_angle_deg,
                                   std::span<const double> hwp_angles_deg);

/// Default 0..180 degree grid in 2.5-degree steps (hits the fringe extremes).
std::vector<double> default_scan_angles();

/// (max - min) / (max + min) over the scanned coincidence probabilities.
double fringe_visibility(std::span<const ScanPoint> points);

}  // namespace sqqss
