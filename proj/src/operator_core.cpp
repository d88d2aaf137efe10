#include "lrblocks/operator_core.hpp"

#include <lapacke.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <random>
#include <set>

namespace lrblocks {

namespace {

bool is_unit_phase(cplx p) {
  constexpr double tol = 1e-12;
  return (std::abs(std::abs(p.real()) - 1.0) < tol && std::abs(p.imag()) < tol) ||
         (std::abs(std::abs(p.imag()) - 1.0) < tol && std::abs(p.real()) < tol);
}

lapack_complex_double* as_lapack(cplx* p) {
  return reinterpret_cast<lapack_complex_double*>(p);
}

void check_register(int n_qubits, int max_qubits) {
  if (n_qubits > max_qubits) {
    throw DimensionError("register of " + std::to_string(n_qubits) +
                         " qubits exceeds the dense cap of " +
                         std::to_string(max_qubits));
  }
}

// Index helpers shared by the two apply_on_qubits variants.
struct LocalLayout {
  std::vector<std::uint64_t> offsets;  // local index -> global bit pattern
  std::vector<std::uint64_t> bases;    // spectator configurations
};

LocalLayout make_layout(std::span<const int> qubits, int n_qubits) {
  const int k = static_cast<int>(qubits.size());
  LocalLayout layout;
  std::uint64_t local_mask = 0;
  std::vector<std::uint64_t> bit_of(k);
  for (int j = 0; j < k; ++j) {
    const int q = qubits[j];
    if (q < 0 || q >= n_qubits) throw std::out_of_range("qubit index out of range");
    bit_of[j] = std::uint64_t{1} << (n_qubits - 1 - q);
    if (local_mask & bit_of[j]) throw std::invalid_argument("repeated qubit index");
    local_mask |= bit_of[j];
  }
  layout.offsets.resize(std::size_t{1} << k);
  for (std::uint64_t m = 0; m < layout.offsets.size(); ++m) {
    std::uint64_t g = 0;
    for (int j = 0; j < k; ++j) {
      if (m & (std::uint64_t{1} << (k - 1 - j))) g |= bit_of[j];
    }
    layout.offsets[m] = g;
  }
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  layout.bases.reserve(dim >> k);
  for (std::uint64_t x = 0; x < dim; ++x) {
    if ((x & local_mask) == 0) layout.bases.push_back(x);
  }
  return layout;
}

}  // namespace

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case 'i': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
  }
  throw std::invalid_argument(std::string("not a Pauli label: ") + c);
}

// ---------------------------------------------------------------- PauliString

PauliString::PauliString(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits <= 0) throw std::invalid_argument("PauliString needs n_qubits > 0");
}

PauliString::PauliString(int n_qubits, std::map<int, Pauli> factors, cplx phase)
    : n_qubits_(n_qubits), phase_(phase) {
  if (n_qubits <= 0) throw std::invalid_argument("PauliString needs n_qubits > 0");
  for (auto [q, p] : factors) {
    if (q < 0 || q >= n_qubits) throw std::out_of_range("Pauli factor index out of range");
    if (p != Pauli::I) factors_.emplace(q, p);
  }
  check_phase();
}

PauliString PauliString::from_label(std::string_view label) {
  std::map<int, Pauli> f;
  for (std::size_t q = 0; q < label.size(); ++q) f[static_cast<int>(q)] = pauli_from_char(label[q]);
  return PauliString(static_cast<int>(label.size()), std::move(f));
}

void PauliString::check_phase() const {
  if (!is_unit_phase(phase_)) throw std::invalid_argument("Pauli phase must be one of +1, -1, +i, -i");
}

Pauli PauliString::at(int qubit) const {
  auto it = factors_.find(qubit);
  return it == factors_.end() ? Pauli::I : it->second;
}

PauliString PauliString::with_phase(cplx phase) const {
  PauliString out = *this;
  out.phase_ = phase;
  out.check_phase();
  return out;
}

std::vector<int> PauliString::support() const {
  std::vector<int> s;
  s.reserve(factors_.size());
  for (const auto& [q, p] : factors_) s.push_back(q);
  return s;
}

PauliString PauliString::restricted_to(std::span<const int> qubits) const {
  std::map<int, Pauli> f;
  for (const auto& [q, p] : factors_) {
    auto it = std::find(qubits.begin(), qubits.end(), q);
    if (it == qubits.end()) throw std::invalid_argument("Pauli factor outside restriction");
    f[static_cast<int>(it - qubits.begin())] = p;
  }
  return PauliString(static_cast<int>(qubits.size()), std::move(f), phase_);
}

std::string PauliString::label() const {
  std::string s(static_cast<std::size_t>(n_qubits_), 'I');
  for (const auto& [q, p] : factors_) s[static_cast<std::size_t>(q)] = to_char(p);
  return s;
}

std::uint64_t PauliString::flip_mask() const {
  std::uint64_t m = 0;
  for (const auto& [q, p] : factors_) {
    if (p == Pauli::X || p == Pauli::Y) m |= std::uint64_t{1} << (n_qubits_ - 1 - q);
  }
  return m;
}

std::uint64_t PauliString::sign_mask() const {
  std::uint64_t m = 0;
  for (const auto& [q, p] : factors_) {
    if (p == Pauli::Y || p == Pauli::Z) m |= std::uint64_t{1} << (n_qubits_ - 1 - q);
  }
  return m;
}

int PauliString::y_count() const {
  return static_cast<int>(std::count_if(factors_.begin(), factors_.end(),
                                        [](const auto& kv) { return kv.second == Pauli::Y; }));
}

// ---------------------------------------------------------------- OperatorSum

OperatorSum& OperatorSum::add(double coeff, PauliString string) {
  if (!std::isfinite(coeff)) throw std::invalid_argument("non-finite coefficient");
  if (string.n_qubits() != n_qubits_) throw std::invalid_argument("qubit count mismatch in OperatorSum");
  if (std::abs(string.phase().imag()) > 1e-12) {
    throw std::invalid_argument("imaginary phase makes the term anti-Hermitian");
  }
  terms_.push_back({coeff, std::move(string)});
  return *this;
}

OperatorSum& OperatorSum::add(const OperatorSum& other, double scale) {
  if (other.n_qubits_ != n_qubits_) throw std::invalid_argument("qubit count mismatch in OperatorSum");
  for (const auto& t : other.terms_) add(scale * t.coeff, t.string);
  return *this;
}

OperatorSum OperatorSum::scaled(double factor) const {
  OperatorSum out(n_qubits_);
  for (const auto& t : terms_) out.add(factor * t.coeff, t.string);
  return out;
}

std::vector<int> OperatorSum::support() const {
  std::set<int> s;
  for (const auto& t : terms_) {
    for (const auto& [q, p] : t.string.factors()) s.insert(q);
  }
  return {s.begin(), s.end()};
}

OperatorSum OperatorSum::restricted_to(std::span<const int> qubits) const {
  OperatorSum out(static_cast<int>(qubits.size()));
  for (const auto& t : terms_) out.add(t.coeff, t.string.restricted_to(qubits));
  return out;
}

double OperatorSum::one_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coeff);
  return s;
}

OperatorSum operator+(const OperatorSum& a, const OperatorSum& b) {
  OperatorSum out = a;
  out.add(b);
  return out;
}

OperatorSum operator*(double c, const OperatorSum& a) { return a.scaled(c); }

// --------------------------------------------------------------- DenseUnitary

DenseUnitary::DenseUnitary(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("unitary must be square");
  if (m_.rows() == 0 || !std::has_single_bit(static_cast<std::uint64_t>(m_.rows()))) {
    throw std::invalid_argument("unitary dimension must be a power of two");
  }
}

DenseUnitary DenseUnitary::identity(Eigen::Index dim) { return DenseUnitary(Matrix::Identity(dim, dim)); }

DenseUnitary DenseUnitary::checked(Matrix m, double tol) {
  DenseUnitary u(std::move(m));
  const double err = u.unitarity_error();
  if (err > tol) throw std::invalid_argument("matrix is not unitary (error " + std::to_string(err) + ")");
  return u;
}

double DenseUnitary::unitarity_error() const {
  const Matrix g = m_.adjoint() * m_ - Matrix::Identity(m_.rows(), m_.cols());
  return spectral_norm(g);
}

// ------------------------------------------------------------ materialization

Matrix materialize(const PauliString& p, int max_qubits) {
  check_register(p.n_qubits(), max_qubits);
  const Eigen::Index dim = Eigen::Index{1} << p.n_qubits();
  Matrix m = Matrix::Zero(dim, dim);
  const std::uint64_t flip = p.flip_mask();
  const std::uint64_t sign = p.sign_mask();
  static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx factor = p.phase() * kIPow[p.y_count() % 4];
  for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
    const double s = (std::popcount(x & sign) & 1) ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(x ^ flip), static_cast<Eigen::Index>(x)) += s * factor;
  }
  return m;
}

Matrix materialize(const OperatorSum& op, int max_qubits) {
  if (op.n_qubits() <= 0) throw std::invalid_argument("operator has no qubits");
  check_register(op.n_qubits(), max_qubits);
  const Eigen::Index dim = Eigen::Index{1} << op.n_qubits();
  Matrix m = Matrix::Zero(dim, dim);
  static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const auto& t : op.terms()) {
    const std::uint64_t flip = t.string.flip_mask();
    const std::uint64_t sign = t.string.sign_mask();
    const cplx factor = t.coeff * t.string.phase() * kIPow[t.string.y_count() % 4];
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
      const double s = (std::popcount(x & sign) & 1) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(x ^ flip), static_cast<Eigen::Index>(x)) += s * factor;
    }
  }
  return m;
}

// -------------------------------------------------------------------- norms

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Eigen::Index n = std::max(a.rows(), a.cols());
  if (n > 512) return spectral_norm_krylov(a);
  Matrix work = a;
  RealVector s(std::min(a.rows(), a.cols()));
  const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(a.rows()),
                                         static_cast<lapack_int>(a.cols()), as_lapack(work.data()),
                                         static_cast<lapack_int>(a.rows()), s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("zgesdd failed with info " + std::to_string(info));
  return s(0);
}

double spectral_norm_krylov(const Matrix& a, double rel_tol) {
  return spectral_norm_krylov(
      a.cols(), [&a](const Vector& q, Vector& w) { w.noalias() = a.adjoint() * (a * q); }, rel_tol);
}

double spectral_norm_krylov(Eigen::Index n, const std::function<void(const Vector&, Vector&)>& gram, double rel_tol) {
  if (n == 0) return 0.0;
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> gauss;
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = cplx(gauss(rng), gauss(rng));
  q.normalize();

  const Eigen::Index max_steps = n;
  Matrix basis(n, std::min<Eigen::Index>(max_steps, 64));
  std::vector<double> alpha;
  std::vector<double> beta;
  double theta = 0.0;
  std::vector<double> history;
  Vector w(n);
  for (Eigen::Index k = 0; k < max_steps; ++k) {
    if (k >= basis.cols()) basis.conservativeResize(Eigen::NoChange, std::min(max_steps, 2 * basis.cols()));
    basis.col(k) = q;
    gram(q, w);
    const double ak = q.dot(w).real();
    alpha.push_back(ak);
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) {
      const Vector h = basis.leftCols(k + 1).adjoint() * w;
      w.noalias() -= basis.leftCols(k + 1) * h;
    }
    const double bk = w.norm();

    const Eigen::Index m = k + 1;
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
                                : Eigen::VectorXd(Eigen::VectorXd::Zero(0));
    // Largest Ritz pair by bisection and inverse iteration.
    double last_component = 1.0;
    {
      lapack_int found = 0;
      lapack_int nsplit = 0;
      double ev = 0.0;
      std::vector<lapack_int> iblock(static_cast<std::size_t>(m));
      std::vector<lapack_int> isplit(static_cast<std::size_t>(m));
      const auto mi = static_cast<lapack_int>(m);
      lapack_int info = LAPACKE_dstebz('I', 'B', mi, 0.0, 0.0, mi, mi, 0.0, diag.data(), sub.data(), &found,
                                       &nsplit, &ev, iblock.data(), isplit.data());
      if (info != 0 || found != 1) throw std::runtime_error("dstebz failed with info " + std::to_string(info));
      theta = ev;
      Eigen::VectorXd z(m);
      lapack_int ifail = 0;
      info = LAPACKE_dstein(LAPACK_COL_MAJOR, mi, diag.data(), sub.data(), 1, &ev, iblock.data(), isplit.data(),
                            z.data(), mi, &ifail);
      if (info == 0) last_component = std::abs(z(m - 1));
    }
    history.push_back(theta);
    if (theta <= 0.0) {
      if (bk < 1e-300) break;
    } else {
      // Ritz values converge long before clustered Ritz vectors do.
      if (m > 10 && theta - history[static_cast<std::size_t>(m - 6)] <= 1e-2 * rel_tol * theta) break;
      if (bk <= 1e-14 * theta) break;
      if (bk * last_component <= rel_tol * theta) break;
    }
    if (bk == 0.0) break;
    beta.push_back(bk);
    q = w / bk;
  }
  return std::sqrt(std::max(theta, 0.0));
}

double hermiticity_error(const Matrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

double commutator_norm(const OperatorSum& a, const OperatorSum& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("operators live on different registers");
  std::set<int> joint;
  for (int q : a.support()) joint.insert(q);
  for (int q : b.support()) joint.insert(q);
  if (joint.empty()) return 0.0;
  const std::vector<int> qubits(joint.begin(), joint.end());
  check_register(static_cast<int>(qubits.size()), kMaxQubits);
  const Matrix ma = materialize(a.restricted_to(qubits));
  const Matrix mb = materialize(b.restricted_to(qubits));
  return spectral_norm(ma * mb - mb * ma);
}

// --------------------------------------------------------------- exponential

HermitianEigensystem::HermitianEigensystem(const Matrix& h, double herm_tol) {
  if (h.rows() != h.cols()) throw NotHermitianError("matrix is not square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (hermiticity_error(h) > herm_tol * scale) throw NotHermitianError("matrix is not Hermitian");
  const auto n = static_cast<lapack_int>(h.rows());
  vectors_ = h;
  values_.resize(n);
  if (n == 0) return;
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, as_lapack(vectors_.data()), n, values_.data());
  if (info != 0) throw std::runtime_error("zheevd failed with info " + std::to_string(info));
}

Matrix HermitianEigensystem::evolution(double t) const {
  Vector phases(values_.size());
  for (Eigen::Index i = 0; i < values_.size(); ++i) phases(i) = std::polar(1.0, -t * values_(i));
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

DenseUnitary matrix_exponential_hermitian(const Matrix& h, double t) {
  if (t == 0.0) {
    if (hermiticity_error(h) > 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
      throw NotHermitianError("matrix is not Hermitian");
    }
    return DenseUnitary::identity(h.rows());
  }
  return DenseUnitary(HermitianEigensystem(h).evolution(t));
}

// ------------------------------------------------------------ local actions

void apply_on_qubits(const Matrix& op, std::span<const int> qubits, int n_qubits, Matrix& target) {
  const auto layout = make_layout(qubits, n_qubits);
  const auto local = static_cast<Eigen::Index>(layout.offsets.size());
  const auto spect = static_cast<Eigen::Index>(layout.bases.size());
  if (op.rows() != local || op.cols() != local) throw std::invalid_argument("local operator has wrong size");
  if (target.rows() != local * spect) throw std::invalid_argument("target has wrong row count");
  const Eigen::Index cols = target.cols();
  Matrix gathered(local, spect * cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index o = 0; o < spect; ++o) {
      const auto base = static_cast<Eigen::Index>(layout.bases[static_cast<std::size_t>(o)]);
      for (Eigen::Index m = 0; m < local; ++m) {
        gathered(m, o + c * spect) = target(base | static_cast<Eigen::Index>(layout.offsets[static_cast<std::size_t>(m)]), c);
      }
    }
  }
  const Matrix updated = op * gathered;
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index o = 0; o < spect; ++o) {
      const auto base = static_cast<Eigen::Index>(layout.bases[static_cast<std::size_t>(o)]);
      for (Eigen::Index m = 0; m < local; ++m) {
        target(base | static_cast<Eigen::Index>(layout.offsets[static_cast<std::size_t>(m)]), c) = updated(m, o + c * spect);
      }
    }
  }
}

void apply_on_qubits_right(const Matrix& op, std::span<const int> qubits, int n_qubits, Matrix& target) {
  // (T E)^T = E^T T^T, so act with op^T on the rows of the transpose.
  Matrix transposed = target.transpose();
  apply_on_qubits(op.transpose(), qubits, n_qubits, transposed);
  target = transposed.transpose();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace lrblocks
