#include "sqqss/qcore.hpp"

#include <cmath>

namespace sqqss {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

Mat2 phase_unitary(double phi) {
  Mat2 u;
  u << Complex(1.0, 0.0), Complex(0.0, 0.0),  //
      Complex(0.0, 0.0), std::polar(1.0, phi);
  return u;
}

Mat2 hwp_unitary() {
  Mat2 u;
  u << Complex(kInvSqrt2, 0.0), Complex(kInvSqrt2, 0.0),  //
      Complex(kInvSqrt2, 0.0), Complex(-kInvSqrt2, 0.0);
  return u;
}

Mat4 lift(const Mat2& op, Subsystem subsystem) {
  Mat4 out = Mat4::Zero();
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp)
      for (int i = 0; i < 2; ++i)
        for (int ip = 0; ip < 2; ++ip) {
          const Complex v = subsystem == Subsystem::Signal
                                ? op(s, sp) * static_cast<double>(i == ip)
                                : op(i, ip) * static_cast<double>(s == sp);
          out(2 * s + i, 2 * sp + ip) = v;
        }
  return out;
}

}  // namespace

PureState1 PureState1::normalized() const {
  const double n = std::sqrt(norm_sq());
  if (n < kZeroProbability)
    throw std::invalid_argument("cannot normalize a zero state");
  return {amp_h / n, amp_v / n};
}

PureState1 axis_state(Axis axis) {
  switch (axis) {
    case Axis::H:
      return {Complex(1.0, 0.0), Complex(0.0, 0.0)};
    case Axis::V:
      return {Complex(0.0, 0.0), Complex(1.0, 0.0)};
    case Axis::PlusX:
      return {Complex(kInvSqrt2, 0.0), Complex(kInvSqrt2, 0.0)};
    case Axis::MinusX:
      return {Complex(kInvSqrt2, 0.0), Complex(-kInvSqrt2, 0.0)};
    case Axis::PlusY:
      return {Complex(kInvSqrt2, 0.0), Complex(0.0, kInvSqrt2)};
    case Axis::MinusY:
      return {Complex(kInvSqrt2, 0.0), Complex(0.0, -kInvSqrt2)};
  }
  throw std::invalid_argument("unknown axis");
}

PureState1 linear_polarization(double angle) {
  return {Complex(std::cos(angle), 0.0), Complex(std::sin(angle), 0.0)};
}

Vec4 kron(const PureState1& signal, const PureState1& idler) {
  Vec4 out;
  out << signal.amp_h * idler.amp_h, signal.amp_h * idler.amp_v,
      signal.amp_v * idler.amp_h, signal.amp_v * idler.amp_v;
  return out;
}

TwoPhotonState TwoPhotonState::from_ket(const Vec4& amps) {
  const double n = amps.norm();
  if (n < kZeroProbability)
    throw std::invalid_argument("cannot normalize a zero ket");
  const Vec4 k = amps / n;
  return TwoPhotonState{k * k.adjoint()};
}

TwoPhotonState TwoPhotonState::from_density(const Mat4& rho) {
  if (!is_valid_density(rho))
    throw std::invalid_argument("not a valid two-photon density matrix");
  return TwoPhotonState{rho};
}

TwoPhotonState TwoPhotonState::bell_phi_plus() {
  Vec4 k = Vec4::Zero();
  k(0) = Complex(kInvSqrt2, 0.0);
  k(3) = Complex(kInvSqrt2, 0.0);
  return TwoPhotonState{k * k.adjoint()};
}

Mat4 Projector::matrix4() const { return lift(matrix2(), subsystem); }

PureState1 apply_phase(const PureState1& state, double phi) {
  return {state.amp_h, state.amp_v * std::polar(1.0, phi)};
}

Mat2 apply_phase(const Mat2& rho, double phi) {
  const Mat2 u = phase_unitary(phi);
  return u * rho * u.adjoint();
}

TwoPhotonState apply_phase(const TwoPhotonState& state, double phi,
                           Subsystem subsystem) {
  const Mat4 u = lift(phase_unitary(phi), subsystem);
  return TwoPhotonState{u * state.rho * u.adjoint()};
}

PureState1 apply_hwp_h_to_x(const PureState1& state) {
  return {kInvSqrt2 * (state.amp_h + state.amp_v),
          kInvSqrt2 * (state.amp_h - state.amp_v)};
}

Mat2 apply_hwp_h_to_x(const Mat2& rho) {
  const Mat2 u = hwp_unitary();
  return u * rho * u.adjoint();
}

TwoPhotonState apply_hwp_h_to_x(const TwoPhotonState& state,
                                Subsystem subsystem) {
  const Mat4 u = lift(hwp_unitary(), subsystem);
  return TwoPhotonState{u * state.rho * u.adjoint()};
}

ConditionResult condition_on(const TwoPhotonState& state,
                             const Projector& proj) {
  const Vec2 a = axis_state(proj.axis).ket();
  Mat2 other = Mat2::Zero();
  // Partial inner product <a|rho|a> over the projected subsystem; what is
  // left is an (unnormalized) operator on the other subsystem.
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      Complex acc(0.0, 0.0);
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
          const int row = proj.subsystem == Subsystem::Idler ? 2 * r + p  //
                                                             : 2 * p + r;
          const int col = proj.subsystem == Subsystem::Idler ? 2 * c + q  //
                                                             : 2 * q + c;
          acc += std::conj(a(p)) * state.rho(row, col) * a(q);
        }
      other(r, c) = acc;
    }
  const double p = other.trace().real();
  if (p < kZeroProbability)
    throw ZeroProbabilityOutcome(
        "projector outcome has zero probability; no conditional state");
  return {other / p, p};
}

Mat2 reduced_state(const TwoPhotonState& state, Subsystem keep) {
  Mat2 out = Mat2::Zero();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      Complex acc(0.0, 0.0);
      for (int t = 0; t < 2; ++t) {
        const int row = keep == Subsystem::Signal ? 2 * r + t : 2 * t + r;
        const int col = keep == Subsystem::Signal ? 2 * c + t : 2 * t + c;
        acc += state.rho(row, col);
      }
      out(r, c) = acc;
    }
  return out;
}

BasisProbs measure_probs(const Mat2& rho, MeasBasis basis) {
  Axis plus;
  Axis minus;
  switch (basis) {
    case MeasBasis::X:
      plus = Axis::PlusX;
      minus = Axis::MinusX;
      break;
    case MeasBasis::Y:
      plus = Axis::PlusY;
      minus = Axis::MinusY;
      break;
    case MeasBasis::HV:
      plus = Axis::H;
      minus = Axis::V;
      break;
    default:
      throw std::invalid_argument("unknown basis");
  }
  const Vec2 kp = axis_state(plus).ket();
  const Vec2 km = axis_state(minus).ket();
  // Both projections computed independently; p_plus + p_minus = tr(rho).
  return {(kp.adjoint() * rho * kp)(0).real(),
          (km.adjoint() * rho * km)(0).real()};
}

double joint_probability(const TwoPhotonState& state, const PureState1& signal,
                         const PureState1& idler) {
  const Vec4 k = kron(signal, idler);
  return (k.adjoint() * state.rho * k)(0).real();
}

double purity(const Mat2& rho) { return (rho * rho).trace().real(); }

double purity(const TwoPhotonState& state) {
  return (state.rho * state.rho).trace().real();
}

double fidelity_to(const Mat2& rho, const PureState1& psi) {
  const Vec2 k = psi.ket();
  return (k.adjoint() * rho * k)(0).real();
}

double fidelity_to(const TwoPhotonState& state, const Vec4& psi) {
  return (psi.adjoint() * state.rho * psi)(0).real();
}

double fidelity(const PureState1& a, const PureState1& b) {
  return std::norm(std::conj(a.amp_h) * b.amp_h +
                   std::conj(a.amp_v) * b.amp_v);
}

namespace {

template <typename Mat>
bool valid_density_impl(const Mat& rho, double tol, double eig_tol) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho.trace().real() - 1.0) > tol) return false;
  if (std::abs(rho.trace().imag()) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Mat> solver(
      ((rho + rho.adjoint()) / 2.0).eval());
  return solver.eigenvalues().minCoeff() >= -eig_tol;
}

}  // namespace

bool is_valid_density(const Mat2& rho, double tol, double eig_tol) {
  return valid_density_impl(rho, tol, eig_tol);
}

bool is_valid_density(const Mat4& rho, double tol, double eig_tol) {
  return valid_density_impl(rho, tol, eig_tol);
}

}  // namespace sqqss
