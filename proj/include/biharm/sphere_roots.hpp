#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "biharm/domain.hpp"

namespace biharm {

/// Map from the unit sphere S^{d-1} to R^m (m <= d-1). Only the first
/// `dimension` components of theta are meaningful.
using SphereMap = std::function<std::vector<double>(const Point& theta)>;

struct OddZeroOptions {
  /// Success threshold on |g(theta)| (Euclidean norm).
  double tolerance = 1e-10;
  /// Uniform samples on the half circle [0, pi] before bisection.
  int angle_samples = 720;
  /// Local descent budget per start (d = 3, m = 2).
  int max_iterations = 200;
  /// Reference direction: angle zero of the search circle (d = 2, or d = 3
  /// with m = 1). Zero means the first coordinate axis.
  Point reference{0.0, 0.0, 0.0};
  /// Randomized oddness spot check.
  int oddness_checks = 16;
  double oddness_tolerance = 1e-12;
  std::uint64_t seed = 0x0dd5eedULL;
};

struct OddZeroResult {
  Point theta{};
  double residual = 0.0;
  int evaluations = 0;
  int start_index = -1;  // multi-start only
};

/// Zero of an odd map g: S^{d-1} -> R^m. d = 2 (m = 1) sweeps the half
/// circle starting at the reference direction and bisects the first sign
/// change, i.e. the zero at the smallest positive angle. d = 3 with m = 1
/// does the same on the great circle through the reference direction; with
/// m = 2 it runs Levenberg-Marquardt on |g|^2 from the 26 directions of a
/// coarse spherical grid, best starting values first.
/// Throws NotOdd (spot check failed) or NoZeroFound (best residual in the
/// message).
OddZeroResult find_odd_zero(const SphereMap& g, int dimension, int active_components,
                            const OddZeroOptions& options = {});

}  // namespace biharm
