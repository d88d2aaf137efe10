#pragma once

#include "lrblocks/operator_core.hpp"

#include <memory>
#include <optional>

namespace lrblocks {

/// Partition of the computational basis into invariant sectors. The trivial
/// partition is one sector holding every basis state; the Hamming partition
/// groups basis states by the number of set bits (total Z magnetization).
struct SectorPartition {
  int n_qubits = 0;
  std::vector<std::vector<Eigen::Index>> sectors;

  static std::shared_ptr<const SectorPartition> trivial(int n_qubits);
  static std::shared_ptr<const SectorPartition> hamming(int n_qubits);

  Eigen::Index dim() const { return Eigen::Index{1} << n_qubits; }
  bool is_trivial() const { return sectors.size() == 1; }
};

/// An operator that is block diagonal with respect to a SectorPartition.
class SectorOperator {
 public:
  SectorOperator() = default;
  SectorOperator(std::shared_ptr<const SectorPartition> partition, std::vector<Matrix> blocks);

  static SectorOperator identity(std::shared_ptr<const SectorPartition> partition);
  /// Splits `dense` into blocks; empty if some off-block entry exceeds `tol`.
  static std::optional<SectorOperator> from_dense(const Matrix& dense,
                                                  std::shared_ptr<const SectorPartition> partition,
                                                  double tol = 1e-12);

  const SectorPartition& partition() const { return *partition_; }
  const std::shared_ptr<const SectorPartition>& partition_ptr() const { return partition_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  Matrix to_dense() const;
  SectorOperator adjoint() const;
  double spectral_norm() const;

  friend SectorOperator operator*(const SectorOperator& a, const SectorOperator& b);
  friend SectorOperator operator-(const SectorOperator& a, const SectorOperator& b);

 private:
  std::shared_ptr<const SectorPartition> partition_;
  std::vector<Matrix> blocks_;
};

/// Eigendecomposition of a Hermitian operator sector by sector.
class SectorEigensystem {
 public:
  SectorEigensystem() = default;
  SectorEigensystem(const SectorOperator& hermitian);

  /// Materializes `op` and picks the Hamming partition when `op` conserves
  /// the number of set bits, the trivial partition otherwise.
  static SectorEigensystem from_operator(const OperatorSum& op);
  /// Materializes `op` against a caller-chosen partition; throws when `op`
  /// is not block diagonal there.
  static SectorEigensystem from_operator(const OperatorSum& op,
                                         std::shared_ptr<const SectorPartition> partition);

  const std::shared_ptr<const SectorPartition>& partition_ptr() const { return partition_; }
  const std::vector<HermitianEigensystem>& sectors() const { return sectors_; }

  /// exp(-i t H)
  SectorOperator evolution(double t) const;

 private:
  std::shared_ptr<const SectorPartition> partition_;
  std::vector<HermitianEigensystem> sectors_;
};

bool conserves_hamming_weight(const OperatorSum& op);

/// ||F_k ... F_1 - target|| with factors in application order; large
/// sectors use a Krylov iteration on matrix-vector products only.
double product_distance(const std::vector<const SectorOperator*>& factors, const SectorOperator& target);

}  // namespace lrblocks
