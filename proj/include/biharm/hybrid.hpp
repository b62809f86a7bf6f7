#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "biharm/eigensolve.hpp"
#include "biharm/mesh.hpp"
#include "biharm/trial_family.hpp"

namespace biharm {

/// A function in span{u_1..u_k} + span{v_1..v_m}: finite element vectors on
/// one mesh plus closed-form trial functions.
struct HybridBasis {
  const MeshDofSystem* mesh = nullptr;
  /// Free-dof coefficient vectors on `mesh`.
  std::vector<Eigen::VectorXd> fem;
  /// May be null (pure finite element span).
  const TrialFamily* family = nullptr;

  std::size_t size() const { return fem.size() + (family ? family->size() : 0); }
};

/// Coefficients of one element of a HybridBasis span.
struct HybridVector {
  Eigen::VectorXd fem;   // one entry per fem member
  Eigen::VectorXd trig;  // one entry per family member
};

/// Value or derivative (total order <= 2) of sum c_i u_i + sum b_l v_l.
double evaluate(const HybridBasis& basis, const HybridVector& coeffs, const Point& x,
                const MultiIndex& derivative = {0, 0, 0});

/// Hessian form and L2 Gram matrix restricted to the span, fem members
/// first. Fem-fem blocks come from the assembled matrices, the rest from
/// per-cell Gauss quadrature with `quadrature_points` per axis and enough
/// subdivisions to resolve the trig factors.
struct RestrictedPencil {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd gram;
};

RestrictedPencil restricted_pencil(const HybridBasis& basis, int quadrature_points = 12);

/// Gram matrix only.
Eigen::MatrixXd hybrid_gram(const HybridBasis& basis, int quadrature_points = 12);

struct SupRayleighResult {
  /// max of the Rayleigh quotient over the span.
  double sup = 0.0;
  std::size_t gram_rank = 0;
  std::size_t size = 0;
  /// max over fem/trig pairs of |H(u_i, v_l) - lambda (u_i, v_l)| /
  /// (lambda ||u_i|| ||v_l||) with lambda the family's target; vanishes up
  /// to quadrature error when the u_i satisfy clamped conditions.
  double cross_term_residual = 0.0;
  RestrictedPencil pencil;
};

/// Rank (of the diagonally normalized Gram matrix, relative threshold
/// rank_tol) and largest generalized eigenvalue of the pencil. Throws
/// RankDeficientSubspace when the rank is below the span size.
SupRayleighResult sup_rayleigh(const RestrictedPencil& pencil, double rank_tol = 1e-8);

/// span{u_1..u_k} + span(family) with u_i the first k eigenvectors of a
/// spectrum computed on `mesh`. Throws MeshMismatch, CountTooLarge,
/// RankDeficientSubspace.
SupRayleighResult subspace_sup_rayleigh(const SpectrumResult& spectrum, const MeshDofSystem& mesh,
                                        const TrialFamily& family, std::size_t k, double rank_tol = 1e-8);

}  // namespace biharm
