#include "lrblocks/sectors.hpp"

#include <bit>

namespace lrblocks {

std::shared_ptr<const SectorPartition> SectorPartition::trivial(int n_qubits) {
  auto p = std::make_shared<SectorPartition>();
  p->n_qubits = n_qubits;
  p->sectors.resize(1);
  const Eigen::Index dim = p->dim();
  p->sectors[0].resize(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) p->sectors[0][static_cast<std::size_t>(i)] = i;
  return p;
}

std::shared_ptr<const SectorPartition> SectorPartition::hamming(int n_qubits) {
  auto p = std::make_shared<SectorPartition>();
  p->n_qubits = n_qubits;
  p->sectors.resize(static_cast<std::size_t>(n_qubits) + 1);
  for (Eigen::Index i = 0; i < p->dim(); ++i) {
    p->sectors[static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(i)))].push_back(i);
  }
  return p;
}

SectorOperator::SectorOperator(std::shared_ptr<const SectorPartition> partition, std::vector<Matrix> blocks)
    : partition_(std::move(partition)), blocks_(std::move(blocks)) {
  if (!partition_ || blocks_.size() != partition_->sectors.size()) {
    throw std::invalid_argument("block count does not match the partition");
  }
  for (std::size_t s = 0; s < blocks_.size(); ++s) {
    const auto d = static_cast<Eigen::Index>(partition_->sectors[s].size());
    if (blocks_[s].rows() != d || blocks_[s].cols() != d) throw std::invalid_argument("block has wrong size");
  }
}

SectorOperator SectorOperator::identity(std::shared_ptr<const SectorPartition> partition) {
  std::vector<Matrix> blocks;
  blocks.reserve(partition->sectors.size());
  for (const auto& s : partition->sectors) {
    const auto d = static_cast<Eigen::Index>(s.size());
    blocks.push_back(Matrix::Identity(d, d));
  }
  return SectorOperator(std::move(partition), std::move(blocks));
}

std::optional<SectorOperator> SectorOperator::from_dense(const Matrix& dense,
                                                         std::shared_ptr<const SectorPartition> partition,
                                                         double tol) {
  if (dense.rows() != partition->dim() || dense.cols() != partition->dim()) {
    throw std::invalid_argument("dense operator does not match the partition dimension");
  }
  std::vector<int> owner(static_cast<std::size_t>(partition->dim()));
  for (std::size_t s = 0; s < partition->sectors.size(); ++s) {
    for (Eigen::Index i : partition->sectors[s]) owner[static_cast<std::size_t>(i)] = static_cast<int>(s);
  }
  for (Eigen::Index c = 0; c < dense.cols(); ++c) {
    for (Eigen::Index r = 0; r < dense.rows(); ++r) {
      if (owner[static_cast<std::size_t>(r)] != owner[static_cast<std::size_t>(c)] && std::abs(dense(r, c)) > tol) {
        return std::nullopt;
      }
    }
  }
  std::vector<Matrix> blocks;
  blocks.reserve(partition->sectors.size());
  for (const auto& idx : partition->sectors) {
    const auto d = static_cast<Eigen::Index>(idx.size());
    Matrix b(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) b(i, j) = dense(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    blocks.push_back(std::move(b));
  }
  return SectorOperator(std::move(partition), std::move(blocks));
}

Matrix SectorOperator::to_dense() const {
  Matrix out = Matrix::Zero(partition_->dim(), partition_->dim());
  for (std::size_t s = 0; s < blocks_.size(); ++s) {
    const auto& idx = partition_->sectors[s];
    for (std::size_t j = 0; j < idx.size(); ++j) {
      for (std::size_t i = 0; i < idx.size(); ++i) {
        out(idx[i], idx[j]) = blocks_[s](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

SectorOperator SectorOperator::adjoint() const {
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) blocks.push_back(b.adjoint());
  return SectorOperator(partition_, std::move(blocks));
}

double SectorOperator::spectral_norm() const {
  double best = 0.0;
  for (const auto& b : blocks_) best = std::max(best, lrblocks::spectral_norm(b));
  return best;
}

namespace {
void require_same_partition(const SectorOperator& a, const SectorOperator& b) {
  if (a.partition_ptr() != b.partition_ptr() && a.partition().sectors != b.partition().sectors) {
    throw std::invalid_argument("sector operators use different partitions");
  }
}
}  // namespace

SectorOperator operator*(const SectorOperator& a, const SectorOperator& b) {
  require_same_partition(a, b);
  std::vector<Matrix> blocks(a.blocks_.size());
  for (std::size_t s = 0; s < blocks.size(); ++s) blocks[s].noalias() = a.blocks_[s] * b.blocks_[s];
  return SectorOperator(a.partition_, std::move(blocks));
}

SectorOperator operator-(const SectorOperator& a, const SectorOperator& b) {
  require_same_partition(a, b);
  std::vector<Matrix> blocks(a.blocks_.size());
  for (std::size_t s = 0; s < blocks.size(); ++s) blocks[s] = a.blocks_[s] - b.blocks_[s];
  return SectorOperator(a.partition_, std::move(blocks));
}

SectorEigensystem::SectorEigensystem(const SectorOperator& hermitian) : partition_(hermitian.partition_ptr()) {
  sectors_.reserve(hermitian.blocks().size());
  for (const auto& b : hermitian.blocks()) sectors_.emplace_back(b);
}

SectorEigensystem SectorEigensystem::from_operator(const OperatorSum& op) {
  const Matrix dense = materialize(op);
  if (auto split = SectorOperator::from_dense(dense, SectorPartition::hamming(op.n_qubits()))) {
    return SectorEigensystem(*split);
  }
  return SectorEigensystem(*SectorOperator::from_dense(dense, SectorPartition::trivial(op.n_qubits())));
}

SectorEigensystem SectorEigensystem::from_operator(const OperatorSum& op,
                                                   std::shared_ptr<const SectorPartition> partition) {
  auto split = SectorOperator::from_dense(materialize(op), std::move(partition));
  if (!split) throw std::invalid_argument("operator is not block diagonal in the requested partition");
  return SectorEigensystem(*split);
}

SectorOperator SectorEigensystem::evolution(double t) const {
  std::vector<Matrix> blocks;
  blocks.reserve(sectors_.size());
  for (const auto& s : sectors_) blocks.push_back(s.evolution(t));
  return SectorOperator(partition_, std::move(blocks));
}

bool conserves_hamming_weight(const OperatorSum& op) {
  return SectorOperator::from_dense(materialize(op), SectorPartition::hamming(op.n_qubits())).has_value();
}

double product_distance(const std::vector<const SectorOperator*>& factors, const SectorOperator& target) {
  const auto& part = target.partition();
  for (const auto* f : factors) {
    if (f->partition_ptr() != target.partition_ptr() && f->partition().sectors.size() != part.sectors.size()) {
      throw DimensionError("product_distance: operators use different sector partitions");
    }
  }
  double best = 0.0;
  for (std::size_t s = 0; s < part.sectors.size(); ++s) {
    const Matrix& t = target.blocks()[s];
    const Eigen::Index d = t.rows();
    if (d <= 96) {
      Matrix prod = Matrix::Identity(d, d);
      for (const auto* f : factors) prod = f->blocks()[s] * prod;
      best = std::max(best, spectral_norm(Matrix(prod - t)));
      continue;
    }
    auto gram = [&](const Vector& q, Vector& w) {
      Vector x = q;
      for (const auto* f : factors) x = f->blocks()[s] * x;
      x.noalias() -= t * q;
      Vector y = x;
      for (auto it = factors.rbegin(); it != factors.rend(); ++it) y = (*it)->blocks()[s].adjoint() * y;
      w = y;
      w.noalias() -= t.adjoint() * x;
    };
    best = std::max(best, spectral_norm_krylov(d, gram, 1e-8));
  }
  return best;
}

}  // namespace lrblocks
