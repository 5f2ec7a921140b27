#include "sqqss/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sqqss/rng.hpp"

namespace sqqss {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSessionBlock = 1024;

constexpr std::array<PhaseAction, 4> kAllActions = {
    PhaseAction{ClassBit::X, 0}, PhaseAction{ClassBit::X, 1},
    PhaseAction{ClassBit::Y, 0}, PhaseAction{ClassBit::Y, 1}};

int count_class(std::span<const PhaseAction> actions, ClassBit c) {
  return static_cast<int>(
      std::count_if(actions.begin(), actions.end(),
                    [c](const PhaseAction& a) { return a.class_bit == c; }));
}

struct GatedSignal {
  Mat2 state;
  double probability;
};

// Conditional signal state entering the chain, given the idler gate fired.
GatedSignal gated_signal(ProtocolVariant variant, const SourceModel& model) {
  const TwoPhotonState pair = emit(model);
  const Axis gate = variant == ProtocolVariant::EntanglementBased
                        ? Axis::PlusX
                        : Axis::H;
  const ConditionResult cond =
      condition_on(pair, Projector{gate, Subsystem::Idler});
  Mat2 state = cond.state;
  if (variant != ProtocolVariant::EntanglementBased)
    state = apply_hwp_h_to_x(state);
  return {state, cond.probability};
}

Axis outcome_axis(MeasBasis basis, int outcome_bit) {
  if (basis == MeasBasis::Y)
    return outcome_bit == 0 ? Axis::PlusY : Axis::MinusY;
  return outcome_bit == 0 ? Axis::PlusX : Axis::MinusX;
}

// Parity bookkeeping shared by reconstruction and its exact-probability
// counterpart. Returns the number of quarter turns (pi/2 phase steps) left
// after pairing class-Y operations against the measurement basis.
int quarter_turns(std::span<const PhaseAction> actions, MeasBasis basis) {
  const int y_count = count_class(actions, ClassBit::Y);
  const int m = basis == MeasBasis::Y ? 1 : 0;
  if ((y_count - m) % 2 != 0)
    throw InvalidRun(
        "measurement basis cannot decode the accumulated phase parity");
  return (y_count - m) / 2;
}

int recipients_secret_xor(std::span<const PhaseAction> actions) {
  int acc = 0;
  for (std::size_t j = 1; j < actions.size(); ++j)
    acc ^= actions[j].secret_bit & 1;
  return acc;
}

RunRecord round_impl(ProtocolVariant variant, const SourceModel& model,
                     const std::vector<PhaseAction>& actions,
                     std::mt19937_64& rng, const CheaterSpec* cheater) {
  if (actions.size() < 2)
    throw std::invalid_argument("a round needs a sender and >= 1 recipient");
  validate(model);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Coincidence gate: non-coincident pairs are simply not counted, so a
  // rejected gate resamples the pair.
  const GatedSignal gated = gated_signal(variant, model);
  while (unit(rng) >= gated.probability) {
  }

  Mat2 state = gated.state;
  for (std::size_t j = 0; j < actions.size(); ++j) {
    if (cheater && static_cast<int>(j) + 1 == cheater->recipient_index) {
      MeasBasis cheat_basis;
      if (cheater->policy == CheaterSpec::BasisPolicy::UniformRandom) {
        cheat_basis = unit(rng) < 0.5 ? MeasBasis::X : MeasBasis::Y;
      } else {
        int y_so_far = 0;
        for (std::size_t k = 0; k < j; ++k)
          y_so_far += actions[k].class_bit == ClassBit::Y ? 1 : 0;
        cheat_basis = y_so_far % 2 == 0 ? MeasBasis::X : MeasBasis::Y;
      }
      const BasisProbs bp = measure_probs(state, cheat_basis);
      const int observed = unit(rng) < bp.p_plus ? 0 : 1;
      state = axis_state(outcome_axis(cheat_basis, observed)).density();
    }
    state = apply_phase(state, actions[j].phase());
  }

  MeasBasis basis = MeasBasis::X;
  if (variant == ProtocolVariant::SendBack)
    basis = unit(rng) < 0.5 ? MeasBasis::X : MeasBasis::Y;

  const BasisProbs bp = measure_probs(state, basis);
  RunRecord record;
  record.actions = actions;
  record.measurement_basis = basis;
  record.outcome_bit = unit(rng) < bp.p_plus ? 0 : 1;
  record.valid = is_valid_run(variant, actions, basis);
  return record;
}

struct SessionTally {
  std::uint64_t valid = 0;
  std::uint64_t errors = 0;
  std::uint64_t checked = 0;
  std::uint64_t checked_errors = 0;
};

SessionStats session_impl(ProtocolVariant variant, const SourceModel& model,
                          int participants, std::uint64_t runs,
                          std::uint64_t seed, const SessionOptions& opts,
                          const CheaterSpec* cheater) {
  if (participants < 2)
    throw std::invalid_argument("need a sender and >= 1 recipient");
  if (runs == 0) throw std::invalid_argument("runs must be >= 1");
  if (!(opts.check_fraction >= 0.0 && opts.check_fraction <= 1.0))
    throw std::invalid_argument("check_fraction must lie in [0, 1]");
  if (cheater &&
      (cheater->recipient_index < 2 || cheater->recipient_index > participants))
    throw std::invalid_argument("cheater index must name a recipient (2..N)");
  validate(model);

  const std::uint64_t blocks = (runs + kSessionBlock - 1) / kSessionBlock;
  std::vector<SessionTally> parts(blocks);
  for_each_block(
      runs, kSessionBlock, opts.workers,
      [&](std::uint64_t block, std::uint64_t begin, std::uint64_t end) {
        auto rng = make_engine(seed, block);
        std::uniform_int_distribution<int> pick(0, 3);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        SessionTally& tally = parts[block];
        std::vector<PhaseAction> actions(
            static_cast<std::size_t>(participants));
        for (std::uint64_t r = begin; r < end; ++r) {
          for (auto& a : actions) a = kAllActions[pick(rng)];
          const RunRecord record =
              round_impl(variant, model, actions, rng, cheater);
          if (!record.valid) continue;
          ++tally.valid;
          bool err;
          try {
            err = reconstruct_secret(record) != actions[0].secret_bit;
          } catch (const InvalidRun&) {
            // SendBack can sift-in runs whose basis cannot decode the
            // phase parity; the recipients cannot recover the secret.
            err = true;
          }
          if (err) ++tally.errors;
          if (unit(rng) < opts.check_fraction) {
            ++tally.checked;
            if (err) ++tally.checked_errors;
          }
        }
      });

  SessionTally total;
  for (const auto& p : parts) {
    total.valid += p.valid;
    total.errors += p.errors;
    total.checked += p.checked;
    total.checked_errors += p.checked_errors;
  }

  SessionStats stats;
  stats.runs_total = runs;
  stats.runs_valid = total.valid;
  stats.runs_checked = total.checked;
  stats.sift_fraction =
      static_cast<double>(total.valid) / static_cast<double>(runs);
  if (cheater) {
    stats.error_rate = total.checked == 0
                           ? 0.0
                           : static_cast<double>(total.checked_errors) /
                                 static_cast<double>(total.checked);
  } else {
    stats.error_rate = total.valid == 0
                           ? 0.0
                           : static_cast<double>(total.errors) /
                                 static_cast<double>(total.valid);
  }
  stats.fidelity = 1.0 - stats.error_rate;
  return stats;
}

}  // namespace

double PhaseAction::phase() const {
  return (class_bit == ClassBit::Y ? kPi / 2.0 : 0.0) +
         (secret_bit ? kPi : 0.0);
}

std::span<const PhaseAction> all_phase_actions() { return kAllActions; }

PreparedSignal prepare_signal(ProtocolVariant variant, const SourceModel& model,
                              std::mt19937_64& rng) {
  validate(model);
  const GatedSignal gated = gated_signal(variant, model);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return {gated.state, unit(rng) < gated.probability, gated.probability};
}

bool is_valid_run(ProtocolVariant variant, std::span<const PhaseAction> actions,
                  MeasBasis measurement_basis) {
  if (variant == ProtocolVariant::SendBack) {
    const int x_count = count_class(actions, ClassBit::X) +
                        (measurement_basis == MeasBasis::X ? 1 : 0);
    return x_count % 2 == 0;
  }
  return count_class(actions, ClassBit::Y) % 2 == 0;
}

BasisProbs round_outcome_distribution(ProtocolVariant variant,
                                      const SourceModel& model,
                                      std::span<const PhaseAction> actions,
                                      MeasBasis measurement_basis) {
  if (actions.size() < 2)
    throw std::invalid_argument("a round needs a sender and >= 1 recipient");
  validate(model);
  Mat2 state = gated_signal(variant, model).state;
  for (const auto& a : actions) state = apply_phase(state, a.phase());
  return measure_probs(state, measurement_basis);
}

RunRecord run_round(ProtocolVariant variant, const SourceModel& model,
                    const std::vector<PhaseAction>& actions,
                    std::mt19937_64& rng) {
  return round_impl(variant, model, actions, rng, nullptr);
}

int reconstruct_secret(const RunRecord& record) {
  if (!record.valid) throw InvalidRun("record was sifted out");
  if (!record.outcome_bit)
    throw InvalidRun("record has no measurement outcome");
  const int quarter = quarter_turns(record.actions, record.measurement_basis);
  return (*record.outcome_bit) ^ recipients_secret_xor(record.actions) ^
         (quarter & 1);
}

double round_success_probability(ProtocolVariant variant,
                                 const SourceModel& model,
                                 std::span<const PhaseAction> actions,
                                 MeasBasis measurement_basis) {
  if (!is_valid_run(variant, actions, measurement_basis))
    throw InvalidRun("action tuple is sifted out");
  const int quarter = quarter_turns(actions, measurement_basis);
  // The outcome bit that makes reconstruction return the sender's secret.
  const int expected = (actions[0].secret_bit & 1) ^
                       recipients_secret_xor(actions) ^ (quarter & 1);
  const BasisProbs bp =
      round_outcome_distribution(variant, model, actions, measurement_basis);
  return expected == 0 ? bp.p_plus : bp.p_minus;
}

SessionStats run_session(ProtocolVariant variant, const SourceModel& model,
                         int participants, std::uint64_t runs,
                         std::uint64_t seed, const SessionOptions& opts) {
  return session_impl(variant, model, participants, runs, seed, opts, nullptr);
}

SessionStats simulate_cheater_intercept_resend(
    ProtocolVariant variant, const SourceModel& model, int participants,
    std::uint64_t runs, std::uint64_t seed, const CheaterSpec& cheater,
    const SessionOptions& opts) {
  return session_impl(variant, model, participants, runs, seed, opts,
                      &cheater);
}

Mat2 premeasure_marginal(ProtocolVariant variant, const SourceModel& model,
                         std::span<const std::optional<PhaseAction>> fixed) {
  if (fixed.size() < 2)
    throw std::invalid_argument("a round needs a sender and >= 1 recipient");
  validate(model);
  Mat2 state = gated_signal(variant, model).state;
  for (const auto& slot : fixed) {
    if (slot.has_value()) {
      state = apply_phase(state, slot->phase());
    } else {
      Mat2 averaged = Mat2::Zero();
      for (const auto& a : kAllActions)
        averaged += apply_phase(state, a.phase());
      state = averaged / 4.0;
    }
  }
  return state;
}

std::vector<ScanPoint> purity_scan(const SourceModel& model,
                                   double idler_angle_deg,
                                   std::span<const double> hwp_angles_deg) {
  validate(model);
  const TwoPhotonState pair = emit(model);
  const PureState1 idler =
      linear_polarization(idler_angle_deg * kPi / 180.0);
  std::vector<ScanPoint> points;
  points.reserve(hwp_angles_deg.size());
  for (const double theta_deg : hwp_angles_deg) {
    // HWP at theta maps the PBS's H-transmission axis to linear
    // polarization at 2*theta.
    const PureState1 signal =
        linear_polarization(2.0 * theta_deg * kPi / 180.0);
    points.push_back(
        {theta_deg, joint_probability(pair, signal, idler)});
  }
  return points;
}

std::vector<double> default_scan_angles() {
  std::vector<double> angles;
  for (double a = 0.0; a <= 180.0 + 1e-9; a += 2.5) angles.push_back(a);
  return angles;
}

double fringe_visibility(std::span<const ScanPoint> points) {
  if (points.empty())
    throw std::invalid_argument("cannot take visibility of an empty scan");
  double lo = points.front().coincidence_probability;
  double hi = lo;
  for (const auto& p : points) {
    lo = std::min(lo, p.coincidence_probability);
    hi = std::max(hi, p.coincidence_probability);
  }
  if (hi + lo <= 0.0) return 0.0;
  return (hi - lo) / (hi + lo);
}

}  // namespace sqqss
