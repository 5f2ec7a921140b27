#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "sqqss/attack.hpp"
#include "sqqss/rng.hpp"

using namespace sqqss;

namespace {

constexpr double kPi = std::numbers::pi;

PerPhotonProbs mirror(const PerPhotonProbs& p) {
  return {p.p_minus_x, p.p_plus_x, p.p_minus_y, p.p_plus_y};
}

// exhaustive reference: walk every length-n detector string
double brute_force_success(const PerPhotonProbs& probs, int n) {
  const std::array<double, 4> p = {probs.p_plus_x, probs.p_minus_x,
                                   probs.p_plus_y, probs.p_minus_y};
  const std::uint64_t strings = 1ULL << (2 * n);
  double total = 0.0;
  for (std::uint64_t s = 0; s < strings; ++s) {
    std::array<std::uint64_t, 4> counts = {0, 0, 0, 0};
    double weight = 1.0;
    std::uint64_t rest = s;
    for (int photon = 0; photon < n; ++photon) {
      const int detector = rest & 3;
      rest >>= 2;
      ++counts[detector];
      weight *= p[detector];
    }
    std::uint64_t best = 0;
    for (const std::uint64_t c : counts) best = std::max(best, c);
    int ties = 0;
    int plus = 0;
    for (int d = 0; d < 4; ++d) {
      if (counts[d] != best) continue;
      ++ties;
      plus += d == 0 || d == 2;
    }
    total += weight * plus / ties;
  }
  return total;
}

}  // namespace

TEST_CASE("per-photon detector marginals") {
  const PerPhotonProbs skew =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.6, 0.0);
  CHECK(std::abs(skew.p_plus_x - 0.30) <= 1e-12);
  CHECK(std::abs(skew.p_minus_x - 0.20) <= 1e-12);
  CHECK(std::abs(skew.p_plus_y - 0.25) <= 1e-12);
  CHECK(std::abs(skew.p_minus_y - 0.25) <= 1e-12);

  const PerPhotonProbs quarter =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.6, kPi / 2);
  CHECK(std::abs(quarter.p_plus_x - 0.25) <= 1e-12);
  CHECK(std::abs(quarter.p_minus_x - 0.25) <= 1e-12);
  CHECK(std::abs(quarter.p_plus_y - 0.30) <= 1e-12);
  CHECK(std::abs(quarter.p_minus_y - 0.20) <= 1e-12);

  for (const double phase : {0.0, kPi / 2, kPi, 3 * kPi / 2, 0.81}) {
    const PerPhotonProbs balanced =
        per_photon_probs(ProtocolVariant::CorrelationBased, 0.5, phase);
    CHECK(std::abs(balanced.p_plus_x - 0.25) <= 1e-12);
    CHECK(std::abs(balanced.p_minus_x - 0.25) <= 1e-12);
    CHECK(std::abs(balanced.p_plus_y - 0.25) <= 1e-12);
    CHECK(std::abs(balanced.p_minus_y - 0.25) <= 1e-12);
    for (const double a_sq : {0.0, 0.3, 0.6, 1.0}) {
      const PerPhotonProbs ent =
          per_photon_probs(ProtocolVariant::EntanglementBased, a_sq, phase);
      CHECK(std::abs(ent.p_plus_x - 0.25) <= 1e-12);
      CHECK(std::abs(ent.p_minus_x - 0.25) <= 1e-12);
      CHECK(std::abs(ent.p_plus_y - 0.25) <= 1e-12);
      CHECK(std::abs(ent.p_minus_y - 0.25) <= 1e-12);
      CHECK(std::abs(per_photon_probs(ProtocolVariant::CorrelationBased, a_sq,
                                      phase)
                         .sum() -
                     1.0) <= 1e-12);
    }
  }

  // the send-back chain exposes the same marginals as the correlation one
  const PerPhotonProbs sb =
      per_photon_probs(ProtocolVariant::SendBack, 0.7, 1.1);
  const PerPhotonProbs corr =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.7, 1.1);
  CHECK(std::abs(sb.p_plus_x - corr.p_plus_x) <= 1e-15);
  CHECK(std::abs(sb.p_minus_y - corr.p_minus_y) <= 1e-15);
}

TEST_CASE("guessing rule on raw counts") {
  auto rng = make_engine(3, 0);
  const EveStrategy plain;
  const EveStrategy reversed{true};
  CHECK(guess_bit({3, 1, 0, 0}, plain, rng) == 0);
  CHECK(guess_bit({0, 5, 1, 2}, plain, rng) == 1);
  CHECK(guess_bit({1, 0, 4, 2}, plain, rng) == 0);
  CHECK(guess_bit({0, 1, 2, 6}, plain, rng) == 1);
  CHECK(guess_bit({3, 1, 0, 0}, reversed, rng) == 1);

  int zeros = 0;
  for (int t = 0; t < 4000; ++t) zeros += guess_bit({2, 2, 0, 0}, plain, rng);
  CHECK(zeros > 1800);
  CHECK(zeros < 2200);
  zeros = 0;
  for (int t = 0; t < 4000; ++t) zeros += guess_bit({0, 0, 0, 0}, plain, rng);
  CHECK(zeros > 1800);
  CHECK(zeros < 2200);
}

TEST_CASE("exact success rates at pinned operating points") {
  const PerPhotonProbs skew =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.6, 0.0);
  CHECK(std::abs(eve_success_exact(skew, 1) - 0.55) <= 1e-12);
  CHECK(std::abs(eve_success_exact(skew, 10) - 0.610605674335936) <= 1e-12);
  CHECK(std::abs(eve_success_exact(skew, 25) - 0.667187539984417) <= 1e-12);
  CHECK(std::abs(eve_success_exact(skew, 100) - 0.789593755818374) <= 1e-12);

  const PerPhotonProbs product =
      per_photon_probs(ProtocolVariant::CorrelationBased, 1.0, 0.0);
  CHECK(std::abs(eve_success_exact(product, 10) - 0.863754272460936) <= 1e-12);
  CHECK(std::abs(eve_success_exact(product, 100) - 0.998524470677383) <=
        1e-12);

  const PerPhotonProbs mid =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.75, 0.0);
  CHECK(std::abs(eve_success_exact(mid, 25) - 0.830077493103078) <= 1e-12);
}

TEST_CASE("balanced sources pin the eavesdropper at a coin flip") {
  const PerPhotonProbs flat =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.5, 0.0);
  for (const int n : {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 50, 100})
    CHECK(std::abs(eve_success_exact(flat, n) - 0.5) <= 1e-12);
}

TEST_CASE("success is invariant under the sender's phase choice") {
  for (const double a_sq : {0.55, 0.6, 0.8}) {
    for (const int n : {3, 10, 25}) {
      const double base = eve_success_exact(
          per_photon_probs(ProtocolVariant::CorrelationBased, a_sq, 0.0), n);
      const double y_phase = eve_success_exact(
          per_photon_probs(ProtocolVariant::CorrelationBased, a_sq, kPi / 2),
          n);
      const double flipped = eve_success_exact(
          per_photon_probs(ProtocolVariant::CorrelationBased, a_sq, kPi), n,
          EveStrategy{true});
      const double y_flipped = eve_success_exact(
          per_photon_probs(ProtocolVariant::CorrelationBased, a_sq,
                           3 * kPi / 2),
          n, EveStrategy{true});
      CHECK(std::abs(base - y_phase) <= 1e-12);
      CHECK(std::abs(base - flipped) <= 1e-12);
      CHECK(std::abs(base - y_flipped) <= 1e-12);
    }
  }
}

TEST_CASE("multinomial enumeration matches the per-string walk") {
  for (const double a_sq : {0.5, 0.6, 0.83, 1.0}) {
    const PerPhotonProbs probs =
        per_photon_probs(ProtocolVariant::CorrelationBased, a_sq, 0.0);
    for (int n = 1; n <= 6; ++n)
      CHECK(std::abs(eve_success_exact(probs, n) -
                     brute_force_success(probs, n)) <= 1e-12);
  }
}

TEST_CASE("closed form reproduces the enumeration") {
  for (int g = 0; g <= 10; ++g) {
    const double a_sq = 0.5 + 0.05 * g;
    const PerPhotonProbs probs =
        per_photon_probs(ProtocolVariant::CorrelationBased, a_sq, 0.0);
    for (int n = 1; n <= 30; ++n) {
      const ClosedFormResult cf = eve_success_closedform(probs, n);
      CHECK(std::abs(cf.full - eve_success_exact(probs, n)) <= 1e-10);
      CHECK(cf.large_n <= cf.full + 1e-12);
    }
  }

  const PerPhotonProbs skew =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.6, 0.0);
  CHECK(std::abs(eve_success_closedform(skew, 100).large_n -
                 0.778283339054577) <= 1e-12);

  const PerPhotonProbs flat =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.5, 0.0);
  const ClosedFormResult balanced = eve_success_closedform(flat, 20);
  CHECK(std::abs(balanced.full - 0.5) <= 1e-12);
  CHECK(std::abs(balanced.large_n - 0.5) <= 1e-12);
}

TEST_CASE("guess reversal is an exact detector relabeling") {
  const EveStrategy reversed{true};
  for (const double a_sq : {0.3, 0.45, 0.7}) {
    const PerPhotonProbs probs =
        per_photon_probs(ProtocolVariant::CorrelationBased, a_sq, 0.0);
    for (const int n : {1, 7, 25}) {
      // identical code path, so identical to the last bit
      CHECK(eve_success_exact(probs, n, reversed) ==
            eve_success_exact(mirror(probs), n));
    }
  }
  // physical mirror: recompute the source at 1 - a^2
  for (const int n : {10, 25}) {
    const double low = eve_success_exact(
        per_photon_probs(ProtocolVariant::CorrelationBased, 0.4, 0.0), n,
        reversed);
    const double high = eve_success_exact(
        per_photon_probs(ProtocolVariant::CorrelationBased, 0.6, 0.0), n);
    CHECK(std::abs(low - high) <= 1e-12);
  }
}

TEST_CASE("success grows with photon budget and source asymmetry") {
  double prev = 0.5;
  for (const int n : {1, 2, 5, 10, 20, 50, 100}) {
    const double s = eve_success_exact(
        per_photon_probs(ProtocolVariant::CorrelationBased, 0.6, 0.0), n);
    CHECK(s >= prev - 1e-12);
    prev = s;
  }
  prev = 0.5;
  for (int g = 0; g <= 10; ++g) {
    const double s = eve_success_exact(
        per_photon_probs(ProtocolVariant::CorrelationBased, 0.5 + 0.05 * g,
                         0.0),
        25);
    CHECK(s >= prev - 1e-12);
    prev = s;
  }
}

TEST_CASE("Monte Carlo estimates agree with the enumeration") {
  for (const double a_sq : {0.5, 0.6, 1.0}) {
    const PerPhotonProbs probs =
        per_photon_probs(ProtocolVariant::CorrelationBased, a_sq, 0.0);
    for (const int n : {10, 100}) {
      const McResult mc = eve_success_montecarlo(probs, n, 100000, 404);
      CHECK(mc.trials == 100000);
      CHECK(mc.zero_count_trials == 0);
      CHECK(std::abs(mc.estimate - eve_success_exact(probs, n)) <=
            4.0 * mc.std_error + 1e-9);
    }
  }
}

TEST_CASE("Monte Carlo runs are reproducible and worker-count invariant") {
  const PerPhotonProbs probs =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.6, 0.0);
  McOptions one;
  one.workers = 1;
  McOptions seven;
  seven.workers = 7;
  const McResult a = eve_success_montecarlo(probs, 25, 60000, 31, {}, one);
  const McResult b = eve_success_montecarlo(probs, 25, 60000, 31, {}, seven);
  const McResult c = eve_success_montecarlo(probs, 25, 60000, 32, {}, one);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
  CHECK(a.estimate != c.estimate);
}

TEST_CASE("pick-off losses pull the estimate toward a coin flip") {
  const PerPhotonProbs probs =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.6, 0.0);
  McOptions lossy;
  lossy.pickoff_fraction = 0.5;
  const McResult mc = eve_success_montecarlo(probs, 1, 200000, 17, {}, lossy);
  // half the pulses arrive empty and fall back to a random guess
  CHECK(std::abs(mc.estimate - 0.525) <= 4.0 * mc.std_error + 1e-9);
  CHECK(std::abs(static_cast<double>(mc.zero_count_trials) / mc.trials - 0.5) <=
        0.01);
}

TEST_CASE("Poisson pulse sizes track the fixed-size answer at n = 100") {
  const PerPhotonProbs probs =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.6, 0.0);
  McOptions fluct;
  fluct.poisson_pulse = true;
  const McResult mc = eve_success_montecarlo(probs, 100, 50000, 19, {}, fluct);
  CHECK(std::abs(mc.estimate - eve_success_exact(probs, 100)) <= 0.01);
}

TEST_CASE("reversal calibration reads the disclosed check bits") {
  const PerPhotonProbs favors_plus =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.7, 0.0);
  const PerPhotonProbs favors_minus =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.3, 0.0);
  CHECK_FALSE(calibrate_reversal(favors_plus, 100, 20, 7).reversal);
  CHECK(calibrate_reversal(favors_minus, 100, 20, 7).reversal);
  CHECK_THROWS_AS(calibrate_reversal(favors_plus, 100, 0, 7),
                  std::invalid_argument);
}

TEST_CASE("sweep table layout and symmetry") {
  const std::vector<int> n_list = {10, 25};
  const std::vector<double> grid = {0.4, 0.5, 0.6, 1.0};
  const std::vector<SweepRow> rows =
      sweep_a2(ProtocolVariant::CorrelationBased, n_list, grid,
               SweepMode::Exact, 0, 1);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].n == 10);
  CHECK(rows[4].n == 25);
  CHECK(rows[0].a_sq == 0.4);
  CHECK(rows[3].a_sq == 1.0);
  for (const SweepRow& row : rows) {
    CHECK(std::isnan(row.p_success_mc));
    CHECK(std::isnan(row.mc_std_error));
    CHECK(row.p_success_exact >= 0.5 - 1e-12);
  }
  // mirrored grid points agree: the low side runs with reversal on
  CHECK(std::abs(rows[0].p_success_exact - rows[2].p_success_exact) <= 1e-12);
  CHECK(std::abs(rows[1].p_success_exact - 0.5) <= 1e-12);

  const std::vector<int> n100 = {100};
  const std::vector<double> edge = {1.0};
  const std::vector<SweepRow> top = sweep_a2(
      ProtocolVariant::CorrelationBased, n100, edge, SweepMode::Both, 20000, 2);
  REQUIRE(top.size() == 1);
  CHECK(std::abs(top[0].p_success_exact - 0.998524470677383) <= 1e-12);
  CHECK(std::abs(top[0].p_success_mc - top[0].p_success_exact) <=
        4.0 * top[0].mc_std_error + 1e-9);

  const std::vector<SweepRow> mc_only =
      sweep_a2(ProtocolVariant::EntanglementBased, n100, edge,
               SweepMode::MonteCarlo, 20000, 2);
  CHECK(std::isnan(mc_only[0].p_success_exact));
  CHECK(std::abs(mc_only[0].p_success_mc - 0.5) <=
        4.0 * mc_only[0].mc_std_error + 1e-9);

  const std::vector<double> bad_grid = {0.5, 1.5};
  CHECK_THROWS_AS(sweep_a2(ProtocolVariant::CorrelationBased, n_list, bad_grid,
                           SweepMode::Exact, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("input validation on the attack entry points") {
  const PerPhotonProbs probs =
      per_photon_probs(ProtocolVariant::CorrelationBased, 0.6, 0.0);
  CHECK_THROWS_AS(eve_success_exact(probs, 0), std::invalid_argument);
  CHECK_THROWS_AS(eve_success_closedform(probs, 0), std::invalid_argument);
  CHECK_THROWS_AS(eve_success_montecarlo(probs, 0, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(eve_success_montecarlo(probs, 10, 0, 1),
                  std::invalid_argument);
  PerPhotonProbs broken = probs;
  broken.p_plus_x += 0.2;
  CHECK_THROWS_AS(eve_success_exact(broken, 5), std::invalid_argument);
  broken = probs;
  broken.p_plus_x = -0.1;
  broken.p_minus_x = 0.6;
  CHECK_THROWS_AS(eve_success_exact(broken, 5), std::invalid_argument);
  McOptions bad;
  bad.pickoff_fraction = 0.0;
  CHECK_THROWS_AS(eve_success_montecarlo(probs, 10, 100, 1, {}, bad),
                  std::invalid_argument);
}
