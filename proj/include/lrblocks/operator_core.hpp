#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrblocks {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest register that may be materialized densely (2^12 = 4096 amplitudes).
inline constexpr int kMaxQubits = 12;

class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotHermitianError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

/**
 * Tensor product of single-qubit Paulis with a phase in {+1, -1, +i, -i}.
 *
 * Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
 * computational-basis index.
 */
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n_qubits);
  PauliString(int n_qubits, std::map<int, Pauli> factors, cplx phase = 1.0);

  /// Parses "XIZY"-style dense labels; qubit 0 is the first character.
  static PauliString from_label(std::string_view label);

  int n_qubits() const { return n_qubits_; }
  const std::map<int, Pauli>& factors() const { return factors_; }
  cplx phase() const { return phase_; }
  bool is_identity() const { return factors_.empty(); }
  Pauli at(int qubit) const;

  PauliString with_phase(cplx phase) const;
  /// Support as sorted qubit indices.
  std::vector<int> support() const;
  /// Same string acting on a smaller register; `qubits[k]` becomes qubit k.
  PauliString restricted_to(std::span<const int> qubits) const;
  std::string label() const;

  /// Bit masks over basis indices (bit n-1-q for qubit q).
  std::uint64_t flip_mask() const;
  std::uint64_t sign_mask() const;
  int y_count() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  void check_phase() const;

  int n_qubits_ = 0;
  std::map<int, Pauli> factors_;
  cplx phase_ = 1.0;
};

struct PauliTerm {
  double coeff;
  PauliString string;
};

/// Hermitian operator written as a real combination of Hermitian Pauli strings.
class OperatorSum {
 public:
  OperatorSum() = default;
  explicit OperatorSum(int n_qubits) : n_qubits_(n_qubits) {}

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  OperatorSum& add(double coeff, PauliString string);
  OperatorSum& add(const OperatorSum& other, double scale = 1.0);
  OperatorSum scaled(double factor) const;

  std::vector<int> support() const;
  OperatorSum restricted_to(std::span<const int> qubits) const;
  /// Sum of |coeff|, the LCU normalization.
  double one_norm() const;

 private:
  int n_qubits_ = 0;
  std::vector<PauliTerm> terms_;
};

OperatorSum operator+(const OperatorSum& a, const OperatorSum& b);
OperatorSum operator*(double c, const OperatorSum& a);

/// Dense unitary on a power-of-two space. Producers inside the library are
/// trusted; `checked` validates an external matrix.
class DenseUnitary {
 public:
  DenseUnitary() = default;
  explicit DenseUnitary(Matrix m);
  static DenseUnitary identity(Eigen::Index dim);
  static DenseUnitary checked(Matrix m, double tol = 1e-10);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  DenseUnitary adjoint() const { return DenseUnitary(m_.adjoint()); }
  double unitarity_error() const;

  friend DenseUnitary operator*(const DenseUnitary& a, const DenseUnitary& b) {
    return DenseUnitary(a.m_ * b.m_);
  }

 private:
  Matrix m_;
};

Matrix materialize(const OperatorSum& op, int max_qubits = kMaxQubits);
Matrix materialize(const PauliString& p, int max_qubits = kMaxQubits);

/// Largest singular value. Full SVD up to dimension 512, Krylov above.
double spectral_norm(const Matrix& a);
/// Lanczos on A^dagger A with full reorthogonalization; deterministic start.
double spectral_norm_krylov(const Matrix& a, double rel_tol = 1e-13);
/// Same iteration driven by w <- A^dagger A q, for operators never formed.
double spectral_norm_krylov(Eigen::Index dim, const std::function<void(const Vector&, Vector&)>& gram,
                            double rel_tol = 1e-13);

double hermiticity_error(const Matrix& h);

/// ||AB - BA|| evaluated on the joint support of the two operators.
double commutator_norm(const OperatorSum& a, const OperatorSum& b);

/// Spectral decomposition kept around so evolutions at many times reuse it.
class HermitianEigensystem {
 public:
  HermitianEigensystem() = default;
  explicit HermitianEigensystem(const Matrix& h, double herm_tol = 1e-10);

  const RealVector& eigenvalues() const { return values_; }
  const Matrix& eigenvectors() const { return vectors_; }
  Eigen::Index dim() const { return values_.size(); }

  /// exp(-i t H)
  Matrix evolution(double t) const;

 private:
  RealVector values_;
  Matrix vectors_;
};

DenseUnitary matrix_exponential_hermitian(const Matrix& h, double t);

/// Applies `op` (acting on `qubits`, in that order) to the rows of `target`,
/// i.e. target <- (op on qubits, identity elsewhere) * target.
void apply_on_qubits(const Matrix& op, std::span<const int> qubits, int n_qubits,
                     Matrix& target);
/// target <- target * (op on qubits, identity elsewhere)
void apply_on_qubits_right(const Matrix& op, std::span<const int> qubits,
                           int n_qubits, Matrix& target);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace lrblocks
