#pragma once

#include "lrblocks/lattice.hpp"

namespace lrblocks::bounds {

inline constexpr int kMaxOverlap = 10000;

struct BoundQuery {
  BoundInputs inputs;
  double t = 0.0;
  int ell = 0;
  int support_size = 1;  // |X|
  double norm_a = 1.0;
  double norm_b = 1.0;
  /// sum over x in X of exp(-mu dist(x, Y)); negative means "use |X| exp(-mu ell)".
  double sum_exp = -1.0;

  double effective_sum_exp() const;
};

enum class Variant { commutator, restriction };

/// 2|A||B||X| (2 zeta0 |t|)^l / l!  (commutator), |X||A| (2 zeta0 |t|)^l / l!  (restriction).
double bound_strict_local(const BoundQuery& q, Variant v = Variant::commutator);

/// (2/sqrt(eta)) |A||B| (exp(zeta |t| sqrt(8 eta)) - 1) sum_exp, and the
/// restriction form with prefactor 2 zeta |t| / sqrt(eta). At eta = 0 the
/// eta -> 0 limit is returned.
double bound_commutator_aware(const BoundQuery& q, Variant v = Variant::commutator);

/// 2|B| sum_{k >= ceil(dist)} (2 sqrt(K) |t|)^k / k!
double bound_strict_commutator_tail(double K, double t, double dist, double norm_b);

enum class BoundKind { strict, commutator_aware };

/// Smallest ell with bound(ell) <= eps_target.
int solve_overlap(double eps_target, double t, const BoundInputs& inputs, BoundKind kind,
                  const BoundQuery& shape = {});

}  // namespace lrblocks::bounds
