#include "lrblocks/qsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lrblocks::qsp {

namespace {

int next_pow2(int m) {
  int p = 1;
  while (p < m) p <<= 1;
  return p;
}

Matrix householder_from_e0(const Vector& g) {
  const Eigen::Index d = g.size();
  Vector v = -g;
  v(0) += 1.0;
  const double nv = v.squaredNorm();
  Matrix out = Matrix::Identity(d, d);
  if (nv < 1e-30) return out;
  out -= (2.0 / nv) * v * v.adjoint();
  return out;
}

// sum_j |j><j| x blocks[j]
Matrix block_select(const std::vector<Matrix>& blocks) {
  const auto d = blocks.front().rows();
  const auto m = static_cast<Eigen::Index>(blocks.size());
  Matrix o = Matrix::Zero(m * d, m * d);
  for (Eigen::Index j = 0; j < m; ++j) o.block(j * d, j * d, d, d) = blocks[static_cast<std::size_t>(j)];
  return o;
}

}  // namespace

OperatorSum random_lcu_hamiltonian(int n_qubits, int terms, std::uint64_t seed) {
  if (n_qubits < 1 || n_qubits > 6) throw std::invalid_argument("random LCU: 1..6 qubits");
  const long long available = (1LL << (2 * n_qubits)) - 1;
  if (terms < 1 || terms > available) throw std::invalid_argument("random LCU: term count out of range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> pick(1, available);
  std::normal_distribution<double> gauss;
  std::vector<long long> codes;
  while (static_cast<int>(codes.size()) < terms) {
    const long long c = pick(rng);
    if (std::find(codes.begin(), codes.end(), c) == codes.end()) codes.push_back(c);
  }
  OperatorSum h(n_qubits);
  for (long long c : codes) {
    std::map<int, Pauli> factors;
    for (int q = 0; q < n_qubits; ++q) {
      const int digit = static_cast<int>((c >> (2 * q)) & 3);
      if (digit != 0) factors[q] = static_cast<Pauli>(digit);
    }
    h.add(gauss(rng), PauliString(n_qubits, std::move(factors)));
  }
  return h;
}

Matrix StandardFormEncoding::corner() const {
  const Eigen::Index d = Eigen::Index{1} << system_qubits;
  Matrix out = Matrix::Zero(d, d);
  const Eigen::Index a = ancilla_dim();
  for (Eigen::Index i = 0; i < a; ++i) {
    if (g_state(i) == cplx(0.0)) continue;
    for (Eigen::Index j = 0; j < a; ++j) {
      if (g_state(j) == cplx(0.0)) continue;
      out += std::conj(g_state(i)) * g_state(j) * select.block(i * d, j * d, d, d);
    }
  }
  return out;
}

double StandardFormEncoding::standard_form_error() const {
  return (corner() - hamiltonian / alpha).cwiseAbs().maxCoeff();
}

double StandardFormEncoding::involution_error() const {
  const Matrix sq = select * select;
  return (sq - Matrix::Identity(sq.rows(), sq.cols())).cwiseAbs().maxCoeff();
}

StandardFormEncoding encode_lcu(const OperatorSum& h) {
  StandardFormEncoding enc;
  enc.system_qubits = h.n_qubits();
  std::vector<double> weights;
  std::vector<Matrix> selects;
  for (const auto& term : h.terms()) {
    if (term.coeff == 0.0) {
      ++enc.dropped_terms;
      continue;
    }
    const double sign = term.coeff < 0.0 ? -1.0 : 1.0;
    weights.push_back(std::abs(term.coeff));
    selects.push_back(sign * materialize(term.string));
  }
  if (weights.empty()) throw std::invalid_argument("encode_lcu: Hamiltonian has no nonzero terms");
  enc.original_terms = static_cast<int>(weights.size());
  enc.terms = next_pow2(enc.original_terms);
  const Eigen::Index d = Eigen::Index{1} << enc.system_qubits;
  if (static_cast<long long>(enc.terms) * d > kMaxEncodingDim) throw DimensionError("encode_lcu: register exceeds 4096");
  while (static_cast<int>(selects.size()) < enc.terms) {
    selects.push_back(Matrix::Identity(d, d));
    weights.push_back(0.0);
  }
  enc.alpha = 0.0;
  for (double w : weights) enc.alpha += w;
  enc.g_state.resize(enc.terms);
  for (int j = 0; j < enc.terms; ++j) enc.g_state(j) = std::sqrt(weights[static_cast<std::size_t>(j)] / enc.alpha);
  enc.prepare = householder_from_e0(enc.g_state);
  enc.select = block_select(selects);
  enc.hamiltonian = materialize(h);
  return enc;
}

Matrix reflection_gadget(double beta) {
  const Matrix x = materialize(PauliString(1, {{0, Pauli::X}}));
  const Matrix i2 = Matrix::Identity(2, 2);
  const Matrix plus = i2 * std::cos(beta) + cplx(0, 1) * std::sin(beta) * x;   // e^{i beta X}
  const Matrix minus = i2 * std::cos(beta) - cplx(0, 1) * std::sin(beta) * x;  // e^{-i beta X}
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1.0;
  swap(1, 2) = swap(2, 1) = 1.0;
  return kron(i2, plus) * swap * kron(i2, minus);
}

StandardFormEncoding encode_lcu_gadget(const std::vector<double>& coeffs, const std::vector<PauliString>& strings) {
  if (coeffs.size() != strings.size() || coeffs.empty()) {
    throw std::invalid_argument("encode_lcu_gadget: need one coefficient per Pauli string");
  }
  const int n = strings.front().n_qubits();
  StandardFormEncoding enc;
  enc.system_qubits = n;
  enc.original_terms = static_cast<int>(coeffs.size());
  enc.terms = next_pow2(enc.original_terms);
  const Eigen::Index d = Eigen::Index{1} << n;
  if (static_cast<long long>(enc.terms) * 4 * d > kMaxEncodingDim) {
    throw DimensionError("encode_lcu_gadget: register exceeds 4096");
  }
  std::vector<Matrix> selects;
  enc.hamiltonian = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double c = coeffs[j];
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("encode_lcu_gadget: coefficient outside [0, 1]");
    if (strings[j].n_qubits() != n) throw std::invalid_argument("encode_lcu_gadget: mixed register sizes");
    const Matrix p = materialize(strings[j]);
    selects.push_back(kron(reflection_gadget(std::acos(std::sqrt(c))), p));
    enc.hamiltonian += c * p;
  }
  const int pad = enc.terms - enc.original_terms;
  for (int k = 0; k < pad; ++k) selects.push_back(kron(reflection_gadget(0.0), Matrix::Identity(d, d)));
  enc.energy_shift = pad;
  enc.hamiltonian += pad * Matrix::Identity(d, d);
  enc.alpha = enc.terms;

  // Index register uniform, gadget pair in |00>.
  enc.g_state = Vector::Zero(4 * enc.terms);
  for (int j = 0; j < enc.terms; ++j) enc.g_state(4 * j) = 1.0 / std::sqrt(static_cast<double>(enc.terms));
  enc.prepare = householder_from_e0(enc.g_state);
  // Regroup blocks |j><j| x Q_j x P_j as (index x gadget) x system.
  enc.select = block_select(selects);
  return enc;
}

Qubiterate build_qubiterate(const StandardFormEncoding& enc, double tol) {
  if (enc.involution_error() > tol) throw std::invalid_argument("qubiterate needs O^2 = 1");
  const Eigen::Index a = enc.ancilla_dim();
  const Eigen::Index d = Eigen::Index{1} << enc.system_qubits;
  const Matrix refl = 2.0 * enc.g_state * enc.g_state.adjoint() - Matrix::Identity(a, a);
  Qubiterate q;
  q.alpha = enc.alpha;
  q.w = cplx(0, -1) * kron(refl, Matrix::Identity(d, d)) * enc.select;
  return q;
}

EigenphaseCheck check_eigenphases(const StandardFormEncoding& enc, const Qubiterate& q) {
  EigenphaseCheck out;
  const HermitianEigensystem es(enc.hamiltonian);
  const Eigen::Index d = es.dim();
  for (Eigen::Index k = 0; k < d; ++k) {
    const double lambda = es.eigenvalues()(k);
    const double ratio = std::clamp(lambda / enc.alpha, -1.0, 1.0);
    const double theta = std::asin(ratio);
    const Vector psi = kron(enc.g_state, es.eigenvectors().col(k));
    const Vector wpsi = q.w * psi;
    const cplx overlap = psi.dot(wpsi);
    Vector perp = wpsi - overlap * psi;
    const double pn = perp.norm();
    ++out.eigenpairs;
    if (pn < 1e-10) {
      // One-dimensional sector at |lambda| = alpha: W psi = e^{-i theta} psi.
      const double th = -std::arg(overlap);
      out.max_phase_error = std::max(out.max_phase_error, std::abs(th - theta));
      out.max_trace_error = std::max(out.max_trace_error, std::abs(overlap * overlap - std::exp(cplx(0, -2.0 * theta))));
      continue;
    }
    perp /= pn;
    Matrix basis(psi.size(), 2);
    basis.col(0) = psi;
    basis.col(1) = perp;
    const Matrix w2 = basis.adjoint() * q.w * basis;
    const Matrix image = q.w * basis;
    out.max_invariance_leak = std::max(out.max_invariance_leak, (image - basis * w2).norm());
    Eigen::ComplexEigenSolver<Matrix> ces(w2);
    const cplx mu_a = ces.eigenvalues()(0);
    const cplx mu_b = ces.eigenvalues()(1);
    // Expected pair: e^{-i theta} and -e^{i theta}.
    auto err = [&](cplx first, cplx second) {
      return std::max(std::abs(-std::arg(first) - theta), std::abs(std::arg(-second) - theta));
    };
    out.max_phase_error = std::max(out.max_phase_error, std::min(err(mu_a, mu_b), err(mu_b, mu_a)));
    const cplx tr = (w2 * w2).trace();
    out.max_trace_error = std::max(out.max_trace_error, std::abs(tr - 2.0 * std::cos(2.0 * theta)));
  }
  return out;
}

std::vector<double> bessel_j(int kmax, double x) {
  if (kmax < 0) throw std::invalid_argument("kmax must be nonnegative");
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double ax = std::abs(x);
  const int m = std::max(kmax, static_cast<int>(ax));
  int start = m + 20 + static_cast<int>(std::sqrt(40.0 * (m + 1)));
  start += start % 2;
  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[static_cast<std::size_t>(start) + 1] = 0.0;
  j[static_cast<std::size_t>(start)] = 1e-300;
  for (int k = start; k >= 1; --k) {
    const auto ku = static_cast<std::size_t>(k);
    j[ku - 1] = 2.0 * k / ax * j[ku] - j[ku + 1];
    if (std::abs(j[ku - 1]) > 1e250) {
      for (std::size_t i = ku - 1; i < j.size(); ++i) j[i] *= 1e-250;
    }
  }
  // J_0 + 2 sum J_{2k} = 1
  double norm = j[0];
  for (std::size_t k = 2; k < j.size(); k += 2) norm += 2.0 * j[k];
  for (int k = 0; k <= kmax; ++k) {
    double v = j[static_cast<std::size_t>(k)] / norm;
    if (x < 0.0 && (k % 2 == 1)) v = -v;
    out[static_cast<std::size_t>(k)] = v;
  }
  return out;
}

double jacobi_anger_bound(double alpha_t, int q) {
  if (alpha_t == 0.0) return q == 0 ? 32.0 : 0.0;
  return 32.0 * std::exp(q * std::log(alpha_t / 2.0) - std::lgamma(q + 1.0));
}

JacobiAngerTruncation jacobi_anger(double alpha_t, double eps_target) {
  if (alpha_t < 0.0) throw std::invalid_argument("alpha t must be nonnegative");
  if (!(eps_target > 0.0)) throw std::invalid_argument("target error must be positive");
  JacobiAngerTruncation r;
  r.alpha_t = alpha_t;
  int q = 1;
  while (jacobi_anger_bound(alpha_t, q) > eps_target) ++q;
  r.order = q;
  r.error_bound = jacobi_anger_bound(alpha_t, q);
  const auto all = bessel_j(q + 60 + static_cast<int>(alpha_t), alpha_t);
  r.coefficients.assign(all.begin(), all.begin() + q);
  for (std::size_t k = static_cast<std::size_t>(q); k < all.size(); ++k) r.tail += 2.0 * std::abs(all[k]);
  return r;
}

cplx jacobi_anger_series(const JacobiAngerTruncation& j, double theta) {
  // e^{-i x sin theta} = J_0 + 2 sum_{even} J_k cos k theta - 2i sum_{odd} J_k sin k theta
  cplx s = j.coefficients.empty() ? cplx(0.0) : cplx(j.coefficients[0]);
  for (std::size_t k = 1; k < j.coefficients.size(); ++k) {
    const double kt = static_cast<double>(k) * theta;
    if (k % 2 == 0) s += 2.0 * j.coefficients[k] * std::cos(kt);
    else s -= cplx(0, 2.0) * j.coefficients[k] * std::sin(kt);
  }
  return s;
}

cplx transfer_function(const std::vector<double>& phis, double theta) {
  if (phis.size() % 2 != 0) throw std::invalid_argument("phase sequence length must be even");
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  for (double phi : phis) {
    // exp(-i theta P / 2) = cos - i sin P
    Eigen::Matrix2cd p;
    p << 0.0, std::exp(cplx(0, -phi)), std::exp(cplx(0, phi)), 0.0;
    const Eigen::Matrix2cd step = c * Eigen::Matrix2cd::Identity() - cplx(0, s) * p;
    u = step * u;
  }
  const double r = 1.0 / std::numbers::sqrt2;
  Eigen::Vector2cd plus(r, r);
  return plus.dot(u * plus);
}

}  // namespace lrblocks::qsp
