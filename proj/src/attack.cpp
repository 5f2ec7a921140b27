#include "sqqss/attack.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sqqss/rng.hpp"

namespace sqqss {

namespace {

constexpr double kProbSumTol = 1e-12;
constexpr std::uint64_t kMcBlock = 4096;

// Detector index order throughout: 0=+x, 1=-x, 2=+y, 3=-y.
constexpr bool is_plus_detector(int d) { return d == 0 || d == 2; }

struct KahanSum {
  double sum = 0.0;
  double residue = 0.0;

  void add(double x) {
    const double y = x - residue;
    const double t = sum + y;
    residue = (t - sum) - y;
    sum = t;
  }
};

std::array<double, 4> prob_array(const PerPhotonProbs& p) {
  return {p.p_plus_x, p.p_minus_x, p.p_plus_y, p.p_minus_y};
}

void validate_probs(const PerPhotonProbs& probs) {
  const auto p = prob_array(probs);
  for (const double v : p)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument(
          "per-photon probabilities must lie in [0, 1]");
  if (std::abs(probs.sum() - 1.0) > kProbSumTol)
    throw std::invalid_argument("per-photon probabilities must sum to 1");
}

std::vector<double> log_factorials(int n) {
  std::vector<double> lf(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) lf[static_cast<std::size_t>(m)] = std::lgamma(m + 1.0);
  return lf;
}

/// log of the multinomial term n!/(i!j!k!l!) * prod p^c, or -inf when a
/// zero-probability detector would need a positive count.
double log_term(const std::array<int, 4>& c, const std::array<double, 4>& p,
                const std::vector<double>& lf, int n) {
  double lt = lf[static_cast<std::size_t>(n)];
  for (int d = 0; d < 4; ++d) {
    const int cd = c[static_cast<std::size_t>(d)];
    if (cd == 0) continue;
    const double pd = p[static_cast<std::size_t>(d)];
    if (pd <= 0.0) return -std::numeric_limits<double>::infinity();
    lt -= lf[static_cast<std::size_t>(cd)];
    lt += cd * std::log(pd);
  }
  return lt;
}

/// Fraction of the random tie-break draws that land on a plus detector.
double success_weight(const std::array<int, 4>& c) {
  const int top = *std::max_element(c.begin(), c.end());
  int ties = 0;
  int plus_ties = 0;
  for (int d = 0; d < 4; ++d) {
    if (c[static_cast<std::size_t>(d)] != top) continue;
    ++ties;
    if (is_plus_detector(d)) ++plus_ties;
  }
  return static_cast<double>(plus_ties) / static_cast<double>(ties);
}

/// Reversing the guess is the same as mirroring the detector labels
/// (+x <-> -x, +y <-> -y), which keeps the enumeration itself unchanged and
/// makes the mirror symmetry of the success rate an identity of the code,
/// not just of the mathematics.
PerPhotonProbs effective_probs(const PerPhotonProbs& probs,
                               const EveStrategy& strategy) {
  if (!strategy.reversal) return probs;
  return {probs.p_minus_x, probs.p_plus_x, probs.p_minus_y, probs.p_plus_y};
}

DetectorCounts sample_counts(int photons, const std::array<double, 4>& p,
                             std::mt19937_64& rng) {
  std::array<std::uint64_t, 4> c{};
  int remaining = photons;
  double mass_left = 1.0;
  for (int d = 0; d < 3 && remaining > 0; ++d) {
    const double q =
        std::clamp(p[static_cast<std::size_t>(d)] / mass_left, 0.0, 1.0);
    std::binomial_distribution<int> bin(remaining, q);
    const int drawn = bin(rng);
    c[static_cast<std::size_t>(d)] = static_cast<std::uint64_t>(drawn);
    remaining -= drawn;
    mass_left -= p[static_cast<std::size_t>(d)];
    if (mass_left <= 0.0) break;
  }
  c[3] = static_cast<std::uint64_t>(remaining);
  return {c[0], c[1], c[2], c[3]};
}

}  // namespace

PerPhotonProbs per_photon_probs(ProtocolVariant variant, double a_sq,
                                double sender_phase) {
  SourceModel model;
  model.a_sq = a_sq;
  model.visibility = 1.0;  // the unmeasured idler makes V irrelevant
  validate(model);

  TwoPhotonState pair = emit(model);
  if (variant != ProtocolVariant::EntanglementBased)
    pair = apply_hwp_h_to_x(pair, Subsystem::Signal);
  pair = apply_phase(pair, sender_phase, Subsystem::Signal);

  const Mat2 signal = reduced_state(pair, Subsystem::Signal);
  const BasisProbs x = measure_probs(signal, MeasBasis::X);
  const BasisProbs y = measure_probs(signal, MeasBasis::Y);
  return {0.5 * x.p_plus, 0.5 * x.p_minus, 0.5 * y.p_plus, 0.5 * y.p_minus};
}

int guess_bit(const DetectorCounts& counts, const EveStrategy& strategy,
              std::mt19937_64& rng) {
  const std::array<std::uint64_t, 4> c = {counts.i, counts.j, counts.k,
                                          counts.l};
  const std::uint64_t top = *std::max_element(c.begin(), c.end());
  if (top == 0) {
    std::uniform_int_distribution<int> coin(0, 1);
    return coin(rng);
  }
  std::array<int, 4> ties{};
  int tie_count = 0;
  for (int d = 0; d < 4; ++d)
    if (c[static_cast<std::size_t>(d)] == top)
      ties[static_cast<std::size_t>(tie_count++)] = d;
  int pick = ties[0];
  if (tie_count > 1) {
    std::uniform_int_distribution<int> which(0, tie_count - 1);
    pick = ties[static_cast<std::size_t>(which(rng))];
  }
  const int bit = is_plus_detector(pick) ? 0 : 1;
  return strategy.reversal ? bit ^ 1 : bit;
}

double eve_success_exact(const PerPhotonProbs& probs, int n,
                         const EveStrategy& strategy) {
  if (n < 1) throw std::invalid_argument("photon count n must be >= 1");
  validate_probs(probs);
  const auto p = prob_array(effective_probs(probs, strategy));
  const auto lf = log_factorials(n);

  // One partial sum per +x count keeps the reduction order fixed no matter
  // how the outer loop is split across workers.
  std::vector<double> partial(static_cast<std::size_t>(n) + 1, 0.0);
  for_each_block(
      static_cast<std::uint64_t>(n) + 1, 8, 0,
      [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t ii = begin; ii < end; ++ii) {
          const int i = static_cast<int>(ii);
          KahanSum acc;
          for (int j = 0; j + i <= n; ++j) {
            for (int k = 0; i + j + k <= n; ++k) {
              const std::array<int, 4> c = {i, j, k, n - i - j - k};
              const double w = success_weight(c);
              if (w == 0.0) continue;
              const double lt = log_term(c, p, lf, n);
              if (std::isinf(lt)) continue;
              acc.add(std::exp(lt) * w);
            }
          }
          partial[ii] = acc.sum;
        }
      });

  KahanSum total;
  for (const double s : partial) total.add(s);
  return total.sum;
}

ClosedFormResult eve_success_closedform(const PerPhotonProbs& probs, int n) {
  if (n < 1) throw std::invalid_argument("photon count n must be >= 1");
  validate_probs(probs);
  const auto p = prob_array(probs);
  const auto lf = log_factorials(n);

  // Restricted enumerations keyed by which detectors tie for the maximum:
  // {+x} alone, {-x} alone, {+x,+y}, {-x,+y}, {+x,+y,-y}, {-x,+y,-y}.
  KahanSum p_i, p_j, p_ik, p_jk, p_ikl, p_jkl;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      for (int k = 0; i + j + k <= n; ++k) {
        const std::array<int, 4> c = {i, j, k, n - i - j - k};
        const int top = *std::max_element(c.begin(), c.end());
        std::uint8_t mask = 0;
        for (int d = 0; d < 4; ++d)
          if (c[static_cast<std::size_t>(d)] == top)
            mask |= static_cast<std::uint8_t>(1 << d);
        KahanSum* bucket = nullptr;
        switch (mask) {
          case 0b0001: bucket = &p_i; break;
          case 0b0010: bucket = &p_j; break;
          case 0b0101: bucket = &p_ik; break;
          case 0b0110: bucket = &p_jk; break;
          case 0b1101: bucket = &p_ikl; break;
          case 0b1110: bucket = &p_jkl; break;
          default: break;
        }
        if (!bucket) continue;
        const double lt = log_term(c, p, lf, n);
        if (std::isinf(lt)) continue;
        bucket->add(std::exp(lt));
      }
    }
  }

  ClosedFormResult out;
  out.large_n = 0.5 * (1.0 + p_i.sum - p_j.sum);
  out.full = 0.5 * (1.0 + p_i.sum - p_j.sum + p_ik.sum - p_jk.sum) +
             (p_ikl.sum - p_jkl.sum) / 6.0;
  return out;
}

McResult eve_success_montecarlo(const PerPhotonProbs& probs, int n,
                                std::uint64_t trials, std::uint64_t seed,
                                const EveStrategy& strategy,
                                const McOptions& opts) {
  if (n < 1) throw std::invalid_argument("photon count n must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(opts.pickoff_fraction > 0.0 && opts.pickoff_fraction <= 1.0))
    throw std::invalid_argument("pickoff_fraction must lie in (0, 1]");
  validate_probs(probs);
  const auto p = prob_array(probs);

  const std::uint64_t blocks = (trials + kMcBlock - 1) / kMcBlock;
  std::vector<std::uint64_t> hits(blocks, 0);
  std::vector<std::uint64_t> empty(blocks, 0);
  for_each_block(
      trials, kMcBlock, opts.workers,
      [&](std::uint64_t block, std::uint64_t begin, std::uint64_t end) {
        auto rng = make_engine(seed, block);
        std::uint64_t block_hits = 0;
        std::uint64_t block_empty = 0;
        for (std::uint64_t t = begin; t < end; ++t) {
          int pulse = n;
          if (opts.poisson_pulse) {
            std::poisson_distribution<int> pulse_size(static_cast<double>(n));
            pulse = pulse_size(rng);
          }
          if (opts.pickoff_fraction < 1.0 && pulse > 0) {
            std::binomial_distribution<int> thin(pulse, opts.pickoff_fraction);
            pulse = thin(rng);
          }
          if (pulse == 0) ++block_empty;
          const DetectorCounts counts = sample_counts(pulse, p, rng);
          if (guess_bit(counts, strategy, rng) == 0) ++block_hits;
        }
        hits[block] = block_hits;
        empty[block] = block_empty;
      });

  McResult result;
  result.trials = trials;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    result.zero_count_trials += empty[b];
  }
  std::uint64_t successes = 0;
  for (const std::uint64_t h : hits) successes += h;
  result.estimate =
      static_cast<double>(successes) / static_cast<double>(trials);
  result.std_error = std::sqrt(
      result.estimate * (1.0 - result.estimate) / static_cast<double>(trials));
  return result;
}

EveStrategy calibrate_reversal(const PerPhotonProbs& probs, int n,
                               int calibration_runs, std::uint64_t seed) {
  if (calibration_runs < 1)
    throw std::invalid_argument("calibration needs at least one run");
  validate_probs(probs);
  const auto p = prob_array(probs);
  auto rng = make_engine(seed, 0);
  int correct = 0;
  for (int r = 0; r < calibration_runs; ++r) {
    const DetectorCounts counts = sample_counts(n, p, rng);
    if (guess_bit(counts, EveStrategy{}, rng) == 0) ++correct;
  }
  return EveStrategy{2 * correct < calibration_runs};
}

std::vector<SweepRow> sweep_a2(ProtocolVariant variant,
                               std::span<const int> n_list,
                               std::span<const double> a2_grid, SweepMode mode,
                               std::uint64_t mc_trials, std::uint64_t seed) {
  for (const double a2 : a2_grid)
    if (!(a2 >= 0.0 && a2 <= 1.0))
      throw std::invalid_argument("a^2 grid values must lie in [0, 1]");
  const bool want_mc = mode != SweepMode::Exact;
  const bool want_exact = mode != SweepMode::MonteCarlo;
  if (want_mc && mc_trials < 1)
    throw std::invalid_argument("Monte Carlo sweep needs trials >= 1");

  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepRow> rows;
  rows.reserve(n_list.size() * a2_grid.size());
  std::uint64_t row_index = 0;
  for (const int n : n_list) {
    for (const double a2 : a2_grid) {
      const EveStrategy strategy{a2 < 0.5};
      const PerPhotonProbs probs = per_photon_probs(variant, a2, 0.0);
      SweepRow row;
      row.a_sq = a2;
      row.n = n;
      row.p_success_exact =
          want_exact ? eve_success_exact(probs, n, strategy) : kNan;
      if (want_mc) {
        const McResult mc = eve_success_montecarlo(
            probs, n, mc_trials, derive_seed(seed, row_index), strategy);
        row.p_success_mc = mc.estimate;
        row.mc_std_error = mc.std_error;
      } else {
        row.p_success_mc = kNan;
        row.mc_std_error = kNan;
      }
      rows.push_back(row);
      ++row_index;
    }
  }
  return rows;
}

}  // namespace sqqss
