#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "biharm/domain.hpp"
#include "biharm/hermite.hpp"
#include "biharm/quadrature.hpp"
#include "biharm/sphere_roots.hpp"

namespace biharm {

enum class FamilyKind { BorsukSine, SymmetricTrig };
std::string to_string(FamilyKind kind);

enum class Phase { Sine, Cosine };

/// v(x) = sin(w . (x - x0)) or cos(w . (x - x0)).
struct TrigMember {
  Point frequency{0.0, 0.0, 0.0};
  Phase phase = Phase::Sine;
  Point origin{0.0, 0.0, 0.0};

  double argument(const Point& x) const;
  /// Any mixed partial derivative, computed analytically.
  double derivative(const Point& x, const MultiIndex& order) const;
  double value(const Point& x) const { return derivative(x, {0, 0, 0}); }
  /// |w|^4, the eigenvalue of the bilaplacian on this member.
  double bilaplacian_factor() const;
  double frequency_norm() const;
};

/// Trial functions built at a target eigenvalue lambda, together with their
/// quadrature Gram matrix.
struct TrialFamily {
  FamilyKind kind = FamilyKind::BorsukSine;
  int dimension = 2;
  double lambda = 0.0;
  std::vector<TrigMember> members;
  /// (v_i, v_j) over the domain.
  Eigen::MatrixXd gram;
  /// Pairs that must be L2-orthogonal (i < j).
  std::vector<std::pair<int, int>> required_pairs;
  /// Distinguished axis of the symmetric family (-1 otherwise).
  int distinguished_axis = -1;
  /// Root-finder residual |g(theta)| at each Borsuk step (empty otherwise).
  std::vector<double> root_residuals;

  std::size_t size() const { return members.size(); }
  double norm(int i) const;
  /// |(v_i, v_j)| / (||v_i|| ||v_j||) for a required pair.
  double orthogonality_residual(int i, int j) const;
  double max_orthogonality_residual() const;
};

struct FamilyOptions {
  /// Gauss points per axis of every quadrature sub-interval.
  int quadrature_points = 12;
  /// Required relative orthogonality residual.
  double tolerance = 1e-10;
  /// Direction of the first Borsuk frequency (zero: first coordinate axis).
  Point seed_direction{0.0, 0.0, 0.0};
  OddZeroOptions root_options{};
};

/// v_1 = sin(w_1 . x) with |w_1| = lambda^(1/4) along the seed direction,
/// then v_l = sin(w_l . x) with w_l a zero of the odd map
/// theta -> ((v_1, sin(|w| theta . x)), ..., (v_{l-1}, ...)) on the sphere.
/// Throws NoZeroFound, NotOdd.
TrialFamily borsuk_family(const RectilinearDomain& dom, double lambda, const FamilyOptions& options = {});

/// sin(w x_a), cos(w x_a) along the distinguished axis a and sin(w x_l) for
/// every other axis, coordinates measured from the symmetry planes (from the
/// bounding-box midpoint on axis a). The distinguished axis is the first one
/// whose complement is covered by the frame. Throws SymmetryMissing.
TrialFamily symmetric_family(const RectilinearDomain& dom, double lambda, const std::vector<ReflectionMap>& frame,
                             const FamilyOptions& options = {});

/// Quadrature nodes over the domain fine enough for trig factors of
/// frequency up to max_frequency.
DomainSamples trig_samples(const RectilinearDomain& dom, double max_frequency, int points_per_axis);

struct IdentityReport {
  /// max over members and sample points of |bilap v - lambda v| / (lambda ||v||_inf).
  double pointwise_residual = 0.0;
  /// max over random combinations of
  /// |sum_ij ||d_ij v||^2 - lambda ||v||^2| / (lambda ||v||^2).
  double hessian_residual = 0.0;
  int combinations = 0;
  int sample_points = 0;
};

struct IdentityOptions {
  int sample_points = 100;
  int combinations = 20;
  std::uint64_t seed = 0x1de7ULL;
  int quadrature_points = 12;
};

/// Checks bilap v = lambda v pointwise and the Hessian-norm identity
/// sum_ij ||d_ij v||^2 = lambda ||v||^2 on random unit combinations of
/// all members.
IdentityReport check_identities(const TrialFamily& family, const RectilinearDomain& dom,
                                const IdentityOptions& options = {});

}  // namespace biharm
