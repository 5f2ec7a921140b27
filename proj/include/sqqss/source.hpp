#pragma once

#include <cstdint>
#include <random>

#include "sqqss/qcore.hpp"

namespace sqqss {

/// Photon-pair source: amplitude asymmetry a_sq, coherence (fringe)
/// visibility between the |HH> and |VV> terms, and the photon budget an
/// eavesdropper can intercept per logical qubit.
struct SourceModel {
  double a_sq = 0.5;
  double visibility = 1.0;
  int photons_per_qubit = 100;
  // When set, the per-qubit pulse size is Poisson with mean photons_per_qubit
  // instead of exactly photons_per_qubit.
  bool poisson_photons = false;
};

/// Throws std::invalid_argument when a field is outside its domain.
void validate(const SourceModel& model);

/// a_sq |HH><HH| + (1-a_sq) |VV><VV| + V a b (|HH><VV| + |VV><HH|),
/// with b = sqrt(1-a_sq). V=1 and a_sq=1/2 give the ideal Bell pair.
TwoPhotonState emit(const SourceModel& model);

// Purity/visibility/fidelity relations for the symmetric dephased pair.
double purity_from_visibility(double visibility);
/// Inverse of purity_from_visibility; throws std::domain_error for
/// purity outside [1/2, 1], which this dephasing model cannot produce.
double visibility_from_purity(double purity);
double fidelity_from_visibility(double visibility);

/// Coefficients of the asymmetric pair rewritten in the +/-x basis:
/// c_same on |+x,+x> and |-x,-x>, c_diff on the cross terms.
struct XBasisCoefficients {
  double c_same;
  double c_diff;
};
XBasisCoefficients x_basis_coefficients(double a_sq);

/// Pulse size for one qubit: photons_per_qubit, or Poisson-distributed with
/// that mean when the model asks for it.
int sample_photon_count(const SourceModel& model, std::mt19937_64& rng);

}  // namespace sqqss
