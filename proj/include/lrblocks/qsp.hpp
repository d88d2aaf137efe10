#pragma once

#include "lrblocks/operator_core.hpp"

#include <cstdint>
#include <vector>

namespace lrblocks::qsp {

/// (<G| x 1) O (|G> x 1) = H / alpha on an ancilla x system register,
/// ancilla qubits most significant.
struct StandardFormEncoding {
  Matrix select;     // O
  Matrix prepare;    // G, with G|0> = |G>
  Vector g_state;    // |G>
  double alpha = 0.0;
  int terms = 0;           // M after padding
  int original_terms = 0;  // M before padding
  int dropped_terms = 0;   // zero coefficients removed
  int system_qubits = 0;
  double energy_shift = 0.0;  // padding adds energy_shift * identity to H
  Matrix hamiltonian;         // dense H including the shift

  Eigen::Index ancilla_dim() const { return g_state.size(); }
  /// The projected corner (<G| x 1) O (|G> x 1).
  Matrix corner() const;
  /// max elementwise |corner - H / alpha|
  double standard_form_error() const;
  double involution_error() const;
};

inline constexpr int kMaxEncodingDim = 4096;

/// `terms` distinct non-identity Pauli strings with N(0, 1) coefficients.
OperatorSum random_lcu_hamiltonian(int n_qubits, int terms, std::uint64_t seed);

/// O = sum_j |j><j| x P_j, |G> = sum_j sqrt(alpha_j / alpha) |j>. Negative
/// coefficients move into the Pauli sign; M pads to a power of two with
/// zero-weight identity selects.
StandardFormEncoding encode_lcu(const OperatorSum& h);

/// Gadget form for coefficients c_j = cos^2 beta_j in [0, 1] with uniform
/// preparation; the ancilla is the index register followed by two gadget
/// qubits. Padding uses identity strings with c = 1.
StandardFormEncoding encode_lcu_gadget(const std::vector<double>& coeffs, const std::vector<PauliString>& strings);

struct Qubiterate {
  Matrix w;
  double alpha = 0.0;
};

/// W = -i ((2|G><G| - 1) x 1) O
Qubiterate build_qubiterate(const StandardFormEncoding& enc, double tol = 1e-10);

struct EigenphaseCheck {
  double max_phase_error = 0.0;    // |theta - arcsin(lambda / alpha)|
  double max_invariance_leak = 0.0;  // component of W^2 psi outside the 2-plane
  double max_trace_error = 0.0;    // |tr W^2 on the plane - 2 cos 2 theta|
  int eigenpairs = 0;
};

EigenphaseCheck check_eigenphases(const StandardFormEncoding& enc, const Qubiterate& q);

/// Bessel J_0..J_kmax at x by Miller's downward recurrence.
std::vector<double> bessel_j(int kmax, double x);

struct JacobiAngerTruncation {
  double alpha_t = 0.0;
  int order = 0;  // q: harmonics 0..q-1 are kept
  std::vector<double> coefficients;
  double error_bound = 0.0;  // 32 (alpha t)^q / (2^q q!)
  double tail = 0.0;         // 2 sum_{k >= q} |J_k(alpha t)|
};

double jacobi_anger_bound(double alpha_t, int q);
JacobiAngerTruncation jacobi_anger(double alpha_t, double eps_target);
/// Truncated expansion of exp(-i alpha t sin theta).
cplx jacobi_anger_series(const JacobiAngerTruncation& j, double theta);

/// <+| prod_k exp(-i theta P_{phi_k} / 2) |+>, P_phi = X cos phi + Y sin phi,
/// phi_N leftmost. N must be even.
cplx transfer_function(const std::vector<double>& phis, double theta);

/// Q = (1 x e^{i beta X}) SWAP (1 x e^{-i beta X})
Matrix reflection_gadget(double beta);

}  // namespace lrblocks::qsp
