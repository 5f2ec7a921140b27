#include <cmath>

#include <doctest.h>

#include "sqqss/rng.hpp"
#include "sqqss/source.hpp"

using namespace sqqss;

TEST_CASE("emit writes the dephased asymmetric pair") {
  SourceModel model;
  model.a_sq = 0.6;
  model.visibility = 0.8;
  const TwoPhotonState state = emit(model);
  const double ab = std::sqrt(0.6 * 0.4);
  CHECK(std::abs(state.rho(0, 0) - Complex(0.6)) <= 1e-15);
  CHECK(std::abs(state.rho(3, 3) - Complex(0.4)) <= 1e-15);
  CHECK(std::abs(state.rho(0, 3) - Complex(0.8 * ab)) <= 1e-15);
  CHECK(std::abs(state.rho(3, 0) - Complex(0.8 * ab)) <= 1e-15);
  CHECK(std::abs(state.rho(1, 1)) <= 1e-15);
  CHECK(std::abs(state.rho(2, 2)) <= 1e-15);
  CHECK(std::abs(state.rho(1, 2)) <= 1e-15);
}

TEST_CASE("emit stays a valid density matrix over the whole domain") {
  for (const double a_sq : {0.0, 0.17, 0.25, 0.5, 0.75, 0.93, 1.0}) {
    for (const double vis : {0.0, 0.3, 0.7483314773547883, 1.0}) {
      SourceModel model;
      model.a_sq = a_sq;
      model.visibility = vis;
      CHECK(is_valid_density(emit(model).rho));
    }
  }
}

TEST_CASE("invalid source parameters are rejected") {
  SourceModel model;
  model.a_sq = 1.1;
  CHECK_THROWS_AS(validate(model), std::invalid_argument);
  model.a_sq = -0.1;
  CHECK_THROWS_AS(validate(model), std::invalid_argument);
  model = SourceModel{};
  model.visibility = 1.01;
  CHECK_THROWS_AS(validate(model), std::invalid_argument);
  model.visibility = -0.2;
  CHECK_THROWS_AS(validate(model), std::invalid_argument);
  model = SourceModel{};
  model.photons_per_qubit = -1;
  CHECK_THROWS_AS(validate(model), std::invalid_argument);
  model.photons_per_qubit = 0;  // an empty pulse is a fine source setting
  CHECK_NOTHROW(validate(model));
}

TEST_CASE("purity, visibility and fidelity relations") {
  CHECK(std::abs(purity_from_visibility(1.0) - 1.0) <= 1e-15);
  CHECK(std::abs(purity_from_visibility(0.0) - 0.5) <= 1e-15);

  const double v = visibility_from_purity(0.78);
  CHECK(std::abs(v - 0.7483314773547883) <= 1e-15);
  CHECK(std::abs(fidelity_from_visibility(v) - 0.8741657386773942) <= 1e-15);

  for (const double vis : {0.0, 0.25, 0.5, 0.7483314773547883, 0.9, 1.0})
    CHECK(std::abs(visibility_from_purity(purity_from_visibility(vis)) - vis) <=
          1e-12);

  CHECK_THROWS_AS(visibility_from_purity(0.49), std::domain_error);
  CHECK_THROWS_AS(visibility_from_purity(1.01), std::domain_error);
}

TEST_CASE("emitted purity matches the scalar relation") {
  for (const double vis : {0.0, 0.5, 0.7483314773547883, 1.0}) {
    SourceModel model;
    model.visibility = vis;
    CHECK(std::abs(purity(emit(model)) - purity_from_visibility(vis)) <=
          1e-12);
  }
}

TEST_CASE("x-basis coefficients of the asymmetric pair") {
  const XBasisCoefficients symmetric = x_basis_coefficients(0.5);
  CHECK(std::abs(symmetric.c_same - 1.0 / std::sqrt(2.0)) <= 1e-15);
  CHECK(std::abs(symmetric.c_diff) <= 1e-15);

  const XBasisCoefficients product = x_basis_coefficients(1.0);
  CHECK(std::abs(product.c_same - 0.5) <= 1e-15);
  CHECK(std::abs(product.c_diff - 0.5) <= 1e-15);

  const XBasisCoefficients skew = x_basis_coefficients(0.6);
  CHECK(std::abs(skew.c_same - 0.7035261006375797) <= 1e-15);
  CHECK(std::abs(skew.c_diff - 0.07107056860390376) <= 1e-15);

  for (const double a_sq : {0.0, 0.3, 0.5, 0.6, 0.85, 1.0}) {
    const XBasisCoefficients c = x_basis_coefficients(a_sq);
    CHECK(std::abs(2.0 * (c.c_same * c.c_same + c.c_diff * c.c_diff) - 1.0) <=
          1e-12);
    // same coefficients read off the pure emitted state
    SourceModel model;
    model.a_sq = a_sq;
    const TwoPhotonState state = emit(model);
    CHECK(std::abs(fidelity_to(state, kron(plus_x(), plus_x())) -
                   c.c_same * c.c_same) <= 1e-12);
    CHECK(std::abs(fidelity_to(state, kron(plus_x(), minus_x())) -
                   c.c_diff * c.c_diff) <= 1e-12);
  }
}

TEST_CASE("signal marginal is H/V-diagonal and x/y-flat for every source") {
  for (const double a_sq : {0.0, 0.25, 0.6, 1.0}) {
    for (const double vis : {0.0, 0.6, 1.0}) {
      SourceModel model;
      model.a_sq = a_sq;
      model.visibility = vis;
      const Mat2 signal = reduced_state(emit(model), Subsystem::Signal);
      CHECK(std::abs(signal(0, 0) - Complex(a_sq)) <= 1e-15);
      CHECK(std::abs(signal(1, 1) - Complex(1.0 - a_sq)) <= 1e-15);
      CHECK(std::abs(signal(0, 1)) <= 1e-15);
      const BasisProbs in_x = measure_probs(signal, MeasBasis::X);
      const BasisProbs in_y = measure_probs(signal, MeasBasis::Y);
      CHECK(std::abs(in_x.p_plus - 0.5) <= 1e-15);
      CHECK(std::abs(in_y.p_plus - 0.5) <= 1e-15);
    }
  }
}

TEST_CASE("pulse sizes: fixed by default, Poisson on request") {
  SourceModel model;
  model.photons_per_qubit = 37;
  auto rng = make_engine(5, 0);
  for (int i = 0; i < 10; ++i) CHECK(sample_photon_count(model, rng) == 37);

  model.poisson_photons = true;
  model.photons_per_qubit = 100;
  auto rng_a = make_engine(5, 1);
  double mean = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) mean += sample_photon_count(model, rng_a);
  mean /= draws;
  CHECK(std::abs(mean - 100.0) <= 0.5);

  auto rng_b = make_engine(5, 1);
  auto rng_c = make_engine(5, 1);
  for (int i = 0; i < 5; ++i)
    CHECK(sample_photon_count(model, rng_b) ==
          sample_photon_count(model, rng_c));
}
