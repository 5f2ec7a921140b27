#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sqqss {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;

// Tolerances shared by all modules: algebraic identities on 4x4 complex
// doubles hold to 1e-12; eigenvalue positivity is looser.
inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kEigenvalueTol = 1e-10;
inline constexpr double kZeroProbability = 1e-14;

enum class Subsystem { Signal, Idler };

enum class Axis { H, V, PlusX, MinusX, PlusY, MinusY };

enum class MeasBasis { X, Y, HV };

/// Thrown by condition_on when the requested projector outcome has
/// (numerically) zero probability, so no conditional state exists.
struct ZeroProbabilityOutcome : std::runtime_error {
  explicit ZeroProbabilityOutcome(const std::string& what)
      : std::runtime_error(what) {}
};

/// Single-photon polarization state amp_h|H> + amp_v|V>.
struct PureState1 {
  Complex amp_h{1.0, 0.0};
  Complex amp_v{0.0, 0.0};

  Vec2 ket() const { return Vec2(amp_h, amp_v); }
  Mat2 density() const {
    const Vec2 k = ket();
    return k * k.adjoint();
  }
  double norm_sq() const { return std::norm(amp_h) + std::norm(amp_v); }
  PureState1 normalized() const;
};

PureState1 axis_state(Axis axis);
inline PureState1 h_state() { return axis_state(Axis::H); }
inline PureState1 v_state() { return axis_state(Axis::V); }
inline PureState1 plus_x() { return axis_state(Axis::PlusX); }
inline PureState1 minus_x() { return axis_state(Axis::MinusX); }
inline PureState1 plus_y() { return axis_state(Axis::PlusY); }
inline PureState1 minus_y() { return axis_state(Axis::MinusY); }

/// Linear polarization at `angle` radians from H: cos(a)|H> + sin(a)|V>.
PureState1 linear_polarization(double angle);

/// |a>|b> in the shared basis ordering {|HH>,|HV>,|VH>,|VV>}, signal first.
Vec4 kron(const PureState1& signal, const PureState1& idler);

/// Two-photon polarization state as a 4x4 density operator over
/// {|HH>,|HV>,|VH>,|VV>}, signal-first. Immutable value; use the factories.
struct TwoPhotonState {
  Mat4 rho = Mat4::Zero();

  static TwoPhotonState from_ket(const Vec4& amps);
  /// Validates Hermiticity, unit trace and positivity; throws
  /// std::invalid_argument otherwise.
  static TwoPhotonState from_density(const Mat4& rho);
  /// (|HH> + |VV>)/sqrt(2).
  static TwoPhotonState bell_phi_plus();
};

struct Projector {
  Axis axis;
  Subsystem subsystem;

  Mat2 matrix2() const { return axis_state(axis).density(); }
  Mat4 matrix4() const;
};

// -- unitaries ---------------------------------------------------------------

/// Relative phase shift diag(1, e^{i phi}) on the |V> component.
PureState1 apply_phase(const PureState1& state, double phi);
Mat2 apply_phase(const Mat2& rho, double phi);
TwoPhotonState apply_phase(const TwoPhotonState& state, double phi,
                           Subsystem subsystem);

/// Half-wave-plate rotation taking |H> to |+x> and |V> to |-x>; involutive.
PureState1 apply_hwp_h_to_x(const PureState1& state);
Mat2 apply_hwp_h_to_x(const Mat2& rho);
TwoPhotonState apply_hwp_h_to_x(const TwoPhotonState& state,
                                Subsystem subsystem);

// -- measurement and conditioning --------------------------------------------

struct ConditionResult {
  Mat2 state;          // renormalized state of the *other* subsystem
  double probability;  // probability of the projector outcome
};

/// Conditions on a projective outcome of one subsystem (coincidence gating)
/// and returns the other subsystem's renormalized state plus the outcome
/// probability. Throws ZeroProbabilityOutcome below kZeroProbability.
ConditionResult condition_on(const TwoPhotonState& state,
                             const Projector& proj);

/// Partial trace down to the kept subsystem.
Mat2 reduced_state(const TwoPhotonState& state, Subsystem keep);

struct BasisProbs {
  double p_plus;
  double p_minus;
};

/// Projection probabilities onto the two axes of a basis. For HV, "plus"
/// means |H>.
BasisProbs measure_probs(const Mat2& rho, MeasBasis basis);

/// Joint transmission probability through per-arm polarizers.
double joint_probability(const TwoPhotonState& state, const PureState1& signal,
                         const PureState1& idler);

// -- scalar figures of merit ---------------------------------------------------

double purity(const Mat2& rho);
double purity(const TwoPhotonState& state);

double fidelity_to(const Mat2& rho, const PureState1& psi);
double fidelity_to(const TwoPhotonState& state, const Vec4& psi);

/// |<a|b>|^2 -- equality of pure states up to global phase.
double fidelity(const PureState1& a, const PureState1& b);

// -- validity checks -----------------------------------------------------------

bool is_valid_density(const Mat2& rho, double tol = kAlgebraTol,
                      double eig_tol = kEigenvalueTol);
bool is_valid_density(const Mat4& rho, double tol = kAlgebraTol,
                      double eig_tol = kEigenvalueTol);

}  // namespace sqqss
