#include "lrblocks/operator_core.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace lrblocks;

namespace {

Matrix pauli(char c) {
  Matrix m(2, 2);
  const cplx i(0, 1);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = Matrix::Identity(2, 2);
  }
  return m;
}

Matrix kron_label(const std::string& label) {
  Matrix m = Matrix::Identity(1, 1);
  for (char c : label) m = kron(m, pauli(c));
  return m;
}

Matrix heisenberg_bond() { return kron_label("XX") + kron_label("YY") + kron_label("ZZ"); }

Matrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = cplx(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("single Z materializes to diag(1, -1)") {
  OperatorSum h(1);
  h.add(1.0, PauliString(1, {{0, Pauli::Z}}));
  const Matrix m = materialize(h);
  CHECK((m - pauli('Z')).norm() == doctest::Approx(0.0));
}

TEST_CASE("empty operator is the zero matrix") {
  const Matrix m = materialize(OperatorSum(2));
  CHECK(m.rows() == 4);
  CHECK(m.norm() == 0.0);
}

TEST_CASE("Heisenberg bond has eigenvalues {1, 1, 1, -3}") {
  OperatorSum h(2);
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) h.add(1.0, PauliString(2, {{0, p}, {1, p}}));
  const Matrix m = materialize(h);
  CHECK((m - heisenberg_bond()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-3.0));
  for (int k = 1; k < 4; ++k) CHECK(es.eigenvalues()(k) == doctest::Approx(1.0));
}

TEST_CASE("materialize agrees with Kronecker products, qubit 0 leftmost") {
  for (const std::string label : {"XIZ", "YZX", "IIY", "ZYI"}) {
    const Matrix m = materialize(PauliString::from_label(label));
    CHECK((m - kron_label(label)).norm() < 1e-12);
  }
}

TEST_CASE("materialize refuses registers above the cap") {
  CHECK_THROWS_AS(materialize(OperatorSum(13)), DimensionError);
}

TEST_CASE("spectral norm examples") {
  CHECK(spectral_norm(Matrix::Identity(4, 4)) == doctest::Approx(1.0));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = -5;
  CHECK(spectral_norm(d) == doctest::Approx(5.0));
  Matrix n = Matrix::Zero(2, 2);
  n(0, 1) = cplx(0, 2);
  CHECK(spectral_norm(n) == doctest::Approx(2.0));
}

TEST_CASE("Krylov spectral norm matches the SVD") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int dim : {5, 40, 200}) {
    Matrix a(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) a(r, c) = cplx(g(rng), g(rng));
    const double svd = Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
    CHECK(spectral_norm_krylov(a) == doctest::Approx(svd).epsilon(1e-10));
    CHECK(spectral_norm(a) == doctest::Approx(svd).epsilon(1e-12));
  }
}

TEST_CASE("Krylov spectral norm on a unitary difference with clustered spectrum") {
  std::mt19937_64 rng(5);
  const Matrix h = random_hermitian(64, rng);
  const Matrix u1 = matrix_exponential_hermitian(h, 0.3).matrix();
  const Matrix u2 = matrix_exponential_hermitian(h, 0.3001).matrix();
  const Matrix diff = u1 - u2;
  const double svd = Eigen::JacobiSVD<Matrix>(diff).singularValues()(0);
  CHECK(spectral_norm_krylov(diff, 1e-8) == doctest::Approx(svd).epsilon(1e-8));
}

TEST_CASE("commutator norm examples") {
  OperatorSum x(1), y(1);
  x.add(1.0, PauliString(1, {{0, Pauli::X}}));
  y.add(1.0, PauliString(1, {{0, Pauli::Y}}));
  CHECK(commutator_norm(x, x) == doctest::Approx(0.0));
  CHECK(commutator_norm(x, y) == doctest::Approx(2.0));

  OperatorSum a(3), b(3);
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
    a.add(1.0, PauliString(3, {{0, p}, {1, p}}));
    b.add(1.0, PauliString(3, {{1, p}, {2, p}}));
  }
  const Matrix ma = kron(heisenberg_bond(), pauli('I'));
  const Matrix mb = kron(pauli('I'), heisenberg_bond());
  const double oracle = Eigen::JacobiSVD<Matrix>(ma * mb - mb * ma).singularValues()(0);
  CHECK(commutator_norm(a, b) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("commutator norm on disjoint supports is zero") {
  OperatorSum a(4), b(4);
  a.add(1.0, PauliString(4, {{0, Pauli::X}}));
  b.add(2.0, PauliString(4, {{3, Pauli::Y}}));
  CHECK(commutator_norm(a, b) == 0.0);
}

TEST_CASE("Hermitian exponential examples") {
  const double pi = std::numbers::pi;
  const Matrix u = matrix_exponential_hermitian(pauli('Z'), pi / 2).matrix();
  CHECK(std::abs(u(0, 0) - std::exp(cplx(0, -pi / 2))) < 1e-12);
  CHECK(std::abs(u(1, 1) - std::exp(cplx(0, pi / 2))) < 1e-12);
  CHECK(std::abs(u(0, 1)) < 1e-12);

  std::mt19937_64 rng(1);
  const Matrix h = random_hermitian(8, rng);
  CHECK((matrix_exponential_hermitian(h, 0.0).matrix() - Matrix::Identity(8, 8)).norm() < 1e-12);

  const Matrix minus = matrix_exponential_hermitian(pauli('X'), pi).matrix();
  CHECK((minus + Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("exponential matches cos/sin closed form for Pauli strings") {
  const Matrix p = kron_label("XYZ");
  for (double t : {-1.3, 0.2, 2.7}) {
    const Matrix closed = std::cos(t) * Matrix::Identity(8, 8) - cplx(0, std::sin(t)) * p;
    CHECK((matrix_exponential_hermitian(p, t).matrix() - closed).norm() < 1e-12);
  }
}

TEST_CASE("exponential rejects non-Hermitian input") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(matrix_exponential_hermitian(m, 1.0), NotHermitianError);
}

TEST_CASE("exponentials are unitary and compose") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix h = random_hermitian(16, rng);
    const auto u1 = matrix_exponential_hermitian(h, 0.4);
    const auto u2 = matrix_exponential_hermitian(h, 0.9);
    CHECK(u1.unitarity_error() < 1e-12);
    CHECK(((u2 * u1).matrix() - matrix_exponential_hermitian(h, 1.3).matrix()).norm() < 1e-11);
  }
}

TEST_CASE("checked unitary rejects a non-unitary matrix") {
  CHECK_THROWS(DenseUnitary::checked(2.0 * Matrix::Identity(2, 2)));
  CHECK_NOTHROW(DenseUnitary::checked(pauli('Y')));
}

TEST_CASE("apply_on_qubits agrees with the embedded dense operator") {
  std::mt19937_64 rng(2);
  const Matrix op = random_hermitian(4, rng);
  const int qubits[] = {2, 0};
  Matrix target = random_hermitian(8, rng);
  const Matrix original = target;
  apply_on_qubits(op, qubits, 3, target);
  // op acts on (q2, q0): permute a 3-qubit operator op x I (on q2, q0, q1).
  Matrix full = kron(op, pauli('I'));
  Matrix perm = Matrix::Zero(8, 8);
  for (int idx = 0; idx < 8; ++idx) {
    const int b2 = (idx >> 2) & 1, b0 = (idx >> 1) & 1, b1 = idx & 1;
    const int natural = (b0 << 2) | (b1 << 1) | b2;
    perm(natural, idx) = 1.0;
  }
  const Matrix embedded = perm * full * perm.transpose();
  CHECK((target - embedded * original).norm() < 1e-12);

  Matrix right = original;
  apply_on_qubits_right(op, qubits, 3, right);
  CHECK((right - original * embedded).norm() < 1e-12);
}

TEST_CASE("Pauli string labels round-trip") {
  const auto p = PauliString::from_label("XIYZ");
  CHECK(p.label() == "XIYZ");
  CHECK(p.support() == std::vector<int>{0, 2, 3});
  CHECK(p.at(1) == Pauli::I);
}

TEST_CASE("one-norm sums absolute coefficients") {
  OperatorSum h(2);
  h.add(-0.5, PauliString::from_label("XI"));
  h.add(2.0, PauliString::from_label("ZZ"));
  CHECK(h.one_norm() == doctest::Approx(2.5));
  CHECK(h.scaled(2.0).one_norm() == doctest::Approx(5.0));
}
