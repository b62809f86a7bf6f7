#include "biharm/sphere_roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "biharm/error.hpp"

namespace biharm {
namespace {

double norm(const Point& p, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += p[a] * p[a];
  return std::sqrt(s);
}

Point normalized(Point p, int d) {
  const double n = norm(p, d);
  for (int a = 0; a < d; ++a) p[a] /= n;
  for (int a = d; a < 3; ++a) p[a] = 0.0;
  return p;
}

double gnorm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Unit vector orthogonal to u, built from the coordinate axis least aligned
// with it.
Point orthogonal_direction(const Point& u, int d) {
  int best = 0;
  for (int a = 1; a < d; ++a)
    if (std::abs(u[a]) < std::abs(u[best])) best = a;
  Point e{0.0, 0.0, 0.0};
  e[best] = 1.0;
  const double c = u[best];
  for (int a = 0; a < d; ++a) e[a] -= c * u[a];
  return normalized(e, d);
}

void check_oddness(const SphereMap& g, int d, const OddZeroOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < opt.oddness_checks; ++i) {
    Point t{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) t[a] = normal(rng);
    t = normalized(t, d);
    const Point mt{-t[0], -t[1], -t[2]};
    const auto gp = g(t);
    const auto gm = g(mt);
    double defect = 0.0;
    for (std::size_t k = 0; k < gp.size(); ++k) defect = std::max(defect, std::abs(gp[k] + gm[k]));
    if (defect > opt.oddness_tolerance * std::max(1.0, gnorm(gp))) {
      std::ostringstream msg;
      msg << "g(-theta) != -g(theta) at a random point (defect " << defect << ")";
      throw Error(ErrorCode::NotOdd, msg.str());
    }
  }
}

// Half-circle sweep plus bisection on theta(phi) = cos(phi) u + sin(phi) v.
OddZeroResult circle_zero(const SphereMap& g, int d, const Point& u, const Point& v, const OddZeroOptions& opt) {
  OddZeroResult res;
  auto at = [&](double phi) {
    Point t{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) t[a] = std::cos(phi) * u[a] + std::sin(phi) * v[a];
    return normalized(t, d);
  };
  auto eval = [&](double phi) {
    ++res.evaluations;
    return g(at(phi)).at(0);
  };
  auto accept = [&](double phi, double gv) {
    res.theta = at(phi);
    res.residual = std::abs(gv);
    return res;
  };

  const int n = std::max(2, opt.angle_samples);
  double lo = 0.0;
  double glo = eval(lo);
  if (std::abs(glo) <= opt.tolerance) return accept(lo, glo);
  for (int i = 1; i <= n; ++i) {
    const double hi = std::numbers::pi * i / n;
    const double ghi = eval(hi);
    if (std::abs(ghi) <= opt.tolerance) return accept(hi, ghi);
    if ((glo < 0.0) != (ghi < 0.0)) {
      double a = lo;
      double b = hi;
      double ga = glo;
      double best_phi = std::abs(glo) < std::abs(ghi) ? lo : hi;
      double best = std::min(std::abs(glo), std::abs(ghi));
      while (true) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double gm = eval(m);
        if (std::abs(gm) < best) {
          best = std::abs(gm);
          best_phi = m;
        }
        if (gm == 0.0) break;
        if ((ga < 0.0) == (gm < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      if (best > opt.tolerance) {
        std::ostringstream msg;
        msg << "bisection stalled at residual " << best;
        throw Error(ErrorCode::NoZeroFound, msg.str());
      }
      return accept(best_phi, best);
    }
    lo = hi;
    glo = ghi;
  }
  throw Error(ErrorCode::NoZeroFound, "no sign change on the half circle");
}

// Orthonormal tangent frame at theta on S^2.
std::array<Point, 2> tangent_frame(const Point& theta) {
  const Point t1 = orthogonal_direction(theta, 3);
  const Point t2{theta[1] * t1[2] - theta[2] * t1[1], theta[2] * t1[0] - theta[0] * t1[2],
                 theta[0] * t1[1] - theta[1] * t1[0]};
  return {t1, t2};
}

Point move(const Point& theta, const Point& t1, const Point& t2, double s1, double s2) {
  Point p{};
  for (int a = 0; a < 3; ++a) p[a] = theta[a] + s1 * t1[a] + s2 * t2[a];
  return normalized(p, 3);
}

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Levenberg-Marquardt on |g|^2 over S^2 in local tangent coordinates with a
// central-difference Jacobian.
bool descend(const SphereMap& g, Point theta, const OddZeroOptions& opt, OddZeroResult& out) {
  constexpr double kStep = 1e-6;
  Eigen::VectorXd r = as_vector(g(theta));
  ++out.evaluations;
  double f = r.norm();
  double mu = 1e-3;
  for (int it = 0; it < opt.max_iterations && f > opt.tolerance; ++it) {
    const auto [t1, t2] = tangent_frame(theta);
    Eigen::MatrixXd J(r.size(), 2);
    for (int c = 0; c < 2; ++c) {
      const double s1 = c == 0 ? kStep : 0.0;
      const double s2 = c == 1 ? kStep : 0.0;
      const Eigen::VectorXd gp = as_vector(g(move(theta, t1, t2, s1, s2)));
      const Eigen::VectorXd gm = as_vector(g(move(theta, t1, t2, -s1, -s2)));
      out.evaluations += 2;
      J.col(c) = (gp - gm) / (2.0 * kStep);
    }
    const Eigen::Matrix2d JtJ = J.transpose() * J;
    const Eigen::Vector2d Jtr = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::Matrix2d H = JtJ;
      H.diagonal().array() += mu * std::max(1.0, JtJ.diagonal().maxCoeff());
      const Eigen::Vector2d delta = -H.ldlt().solve(Jtr);
      const Point cand = move(theta, t1, t2, delta[0], delta[1]);
      const Eigen::VectorXd rc = as_vector(g(cand));
      ++out.evaluations;
      if (rc.norm() < f) {
        theta = cand;
        r = rc;
        f = rc.norm();
        mu = std::max(mu * 0.1, 1e-15);
        improved = true;
        break;
      }
      mu *= 10.0;
    }
    if (!improved) break;
  }
  out.theta = theta;
  out.residual = f;
  return f <= opt.tolerance;
}

OddZeroResult multistart_zero(const SphereMap& g, const OddZeroOptions& opt) {
  struct Start {
    Point theta;
    double value;
  };
  std::vector<Start> starts;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        const Point t = normalized(Point{double(i), double(j), double(k)}, 3);
        starts.push_back({t, gnorm(g(t))});
      }
  std::stable_sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) { return a.value < b.value; });

  OddZeroResult best;
  best.residual = std::numeric_limits<double>::infinity();
  int evaluations = static_cast<int>(starts.size());
  for (std::size_t s = 0; s < starts.size(); ++s) {
    OddZeroResult attempt;
    const bool ok = descend(g, starts[s].theta, opt, attempt);
    evaluations += attempt.evaluations;
    if (attempt.residual < best.residual) {
      best = attempt;
      best.start_index = static_cast<int>(s);
    }
    if (ok) break;
  }
  best.evaluations = evaluations;
  if (best.residual > opt.tolerance) {
    std::ostringstream msg;
    msg << "descent from " << starts.size() << " starts reached residual " << best.residual;
    throw Error(ErrorCode::NoZeroFound, msg.str());
  }
  return best;
}

}  // namespace

OddZeroResult find_odd_zero(const SphereMap& g, int dimension, int active_components,
                            const OddZeroOptions& options) {
  if (dimension != 2 && dimension != 3) throw Error(ErrorCode::BadDimension, "sphere search needs d = 2 or 3");
  if (active_components < 1 || active_components > dimension - 1)
    throw Error(ErrorCode::BadDimension, "number of active components must lie in [1, d-1]");
  check_oddness(g, dimension, options);

  if (active_components == 1) {
    Point u = options.reference;
    if (norm(u, dimension) == 0.0) u = Point{1.0, 0.0, 0.0};
    u = normalized(u, dimension);
    Point v{};
    if (dimension == 2) {
      v = Point{-u[1], u[0], 0.0};
    } else {
      v = orthogonal_direction(u, 3);
    }
    return circle_zero(g, dimension, u, v, options);
  }
  return multistart_zero(g, options);
}

}  // namespace biharm
