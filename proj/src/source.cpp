#include "sqqss/source.hpp"

#include <cmath>
#include <stdexcept>

namespace sqqss {

void validate(const SourceModel& model) {
  if (!(model.a_sq >= 0.0 && model.a_sq <= 1.0))
    throw std::invalid_argument("a_sq must lie in [0, 1]");
  if (!(model.visibility >= 0.0 && model.visibility <= 1.0))
    throw std::invalid_argument("visibility must lie in [0, 1]");
  if (model.photons_per_qubit < 0)
    throw std::invalid_argument("photons_per_qubit must be >= 0");
}

TwoPhotonState emit(const SourceModel& model) {
  validate(model);
  const double a2 = model.a_sq;
  const double b2 = 1.0 - a2;
  const double coh = model.visibility * std::sqrt(a2) * std::sqrt(b2);
  Mat4 rho = Mat4::Zero();
  rho(0, 0) = Complex(a2, 0.0);
  rho(3, 3) = Complex(b2, 0.0);
  rho(0, 3) = Complex(coh, 0.0);
  rho(3, 0) = Complex(coh, 0.0);
  return TwoPhotonState{rho};
}

double purity_from_visibility(double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw std::domain_error("visibility must lie in [0, 1]");
  return 0.5 * (1.0 + visibility * visibility);
}

double visibility_from_purity(double purity) {
  if (!(purity >= 0.5 && purity <= 1.0))
    throw std::domain_error(
        "purity outside [1/2, 1] is not representable by the dephased pair");
  return std::sqrt(2.0 * purity - 1.0);
}

double fidelity_from_visibility(double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw std::domain_error("visibility must lie in [0, 1]");
  return 0.5 * (1.0 + visibility);
}

XBasisCoefficients x_basis_coefficients(double a_sq) {
  if (!(a_sq >= 0.0 && a_sq <= 1.0))
    throw std::invalid_argument("a_sq must lie in [0, 1]");
  const double a = std::sqrt(a_sq);
  const double b = std::sqrt(1.0 - a_sq);
  return {0.5 * (a + b), 0.5 * (a - b)};
}

int sample_photon_count(const SourceModel& model, std::mt19937_64& rng) {
  validate(model);
  if (!model.poisson_photons) return model.photons_per_qubit;
  std::poisson_distribution<int> dist(
      static_cast<double>(model.photons_per_qubit));
  return dist(rng);
}

}  // namespace sqqss
