#include "biharm/trial_family.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "biharm/error.hpp"
#include "biharm/parallel.hpp"

namespace biharm {
namespace {

constexpr std::size_t kSampleChunk = 4096;

Eigen::MatrixXd member_values(const std::vector<TrigMember>& members, const DomainSamples& s) {
  const auto n = static_cast<Eigen::Index>(s.points.size());
  Eigen::MatrixXd V(n, static_cast<Eigen::Index>(members.size()));
  for_each_chunk(s.points.size(), kSampleChunk, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q)
      for (std::size_t l = 0; l < members.size(); ++l)
        V(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(l)) = members[l].value(s.points[q]);
  });
  return V;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& V, const DomainSamples& s) {
  const Eigen::Map<const Eigen::VectorXd> w(s.weights.data(), static_cast<Eigen::Index>(s.weights.size()));
  return V.transpose() * w.asDiagonal() * V;
}

// Inner products (u_a, f) for several fixed u_a against one varying f, with
// a reduction order that does not depend on the thread count.
std::vector<double> projections(const Eigen::MatrixXd& weighted_fixed, const DomainSamples& s,
                                const TrigMember& f) {
  const std::size_t n = s.points.size();
  const auto m = static_cast<std::size_t>(weighted_fixed.cols());
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(m, 0.0));
  for_each_chunk(n, kSampleChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto& acc = partial[c];
    for (std::size_t q = b; q < e; ++q) {
      const double v = f.value(s.points[q]);
      for (std::size_t a = 0; a < m; ++a)
        acc[a] += weighted_fixed(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(a)) * v;
    }
  });
  std::vector<double> out(m, 0.0);
  for (const auto& p : partial)
    for (std::size_t a = 0; a < m; ++a) out[a] += p[a];
  return out;
}

void fill_required_all(TrialFamily& fam) {
  const int m = static_cast<int>(fam.members.size());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) fam.required_pairs.emplace_back(i, j);
}

double max_frequency(const std::vector<TrigMember>& members) {
  double w = 0.0;
  for (const auto& m : members)
    for (double c : m.frequency) w = std::max(w, std::abs(c));
  return w;
}

void check_lambda(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw Error(ErrorCode::NonFiniteValue, "target eigenvalue must be positive and finite");
}

}  // namespace

std::string to_string(FamilyKind kind) {
  return kind == FamilyKind::BorsukSine ? "borsuk-sine" : "symmetric-trig";
}

double TrigMember::argument(const Point& x) const {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += frequency[a] * (x[a] - origin[a]);
  return s;
}

double TrigMember::derivative(const Point& x, const MultiIndex& order) const {
  double factor = 1.0;
  int total = phase == Phase::Cosine ? 1 : 0;
  for (int a = 0; a < 3; ++a) {
    if (order[a] < 0) throw Error(ErrorCode::BadMultiIndex, "negative derivative order");
    for (int k = 0; k < order[a]; ++k) factor *= frequency[a];
    total += order[a];
  }
  const double t = argument(x);
  // d/dt sin = sin(t + pi/2); stay on exact sin/cos to keep oddness bitwise.
  switch (total % 4) {
    case 0: return factor * std::sin(t);
    case 1: return factor * std::cos(t);
    case 2: return -factor * std::sin(t);
    default: return -factor * std::cos(t);
  }
}

double TrigMember::frequency_norm() const {
  return std::sqrt(frequency[0] * frequency[0] + frequency[1] * frequency[1] + frequency[2] * frequency[2]);
}

double TrigMember::bilaplacian_factor() const {
  const double w2 = frequency[0] * frequency[0] + frequency[1] * frequency[1] + frequency[2] * frequency[2];
  return w2 * w2;
}

double TrialFamily::norm(int i) const { return std::sqrt(std::max(0.0, gram(i, i))); }

double TrialFamily::orthogonality_residual(int i, int j) const {
  const double d = norm(i) * norm(j);
  return d > 0.0 ? std::abs(gram(i, j)) / d : std::abs(gram(i, j));
}

double TrialFamily::max_orthogonality_residual() const {
  double r = 0.0;
  for (const auto& [i, j] : required_pairs) r = std::max(r, orthogonality_residual(i, j));
  return r;
}

DomainSamples trig_samples(const RectilinearDomain& dom, double max_frequency, int points_per_axis) {
  const int sub = trig_subdivisions(dom.cell_size(), max_frequency);
  return sample_domain(dom, make_quadrature(dom.dimension(), points_per_axis, dom.cell_size(), sub));
}

TrialFamily borsuk_family(const RectilinearDomain& dom, double lambda, const FamilyOptions& options) {
  check_lambda(lambda);
  const int d = dom.dimension();
  const double omega = std::pow(lambda, 0.25);
  const DomainSamples samples = trig_samples(dom, omega, options.quadrature_points);
  const auto n = static_cast<Eigen::Index>(samples.points.size());
  const Eigen::Map<const Eigen::VectorXd> w(samples.weights.data(), n);

  Point seed = options.seed_direction;
  double sn = 0.0;
  for (int a = 0; a < d; ++a) sn += seed[a] * seed[a];
  if (sn == 0.0) {
    seed = Point{1.0, 0.0, 0.0};
    sn = 1.0;
  }
  sn = std::sqrt(sn);
  for (int a = 0; a < 3; ++a) seed[a] = a < d ? seed[a] / sn : 0.0;

  TrialFamily fam;
  fam.kind = FamilyKind::BorsukSine;
  fam.dimension = d;
  fam.lambda = lambda;
  auto member_at = [&](const Point& theta) {
    TrigMember m;
    for (int a = 0; a < d; ++a) m.frequency[a] = omega * theta[a];
    return m;
  };
  fam.members.push_back(member_at(seed));

  const double reference_norm = std::sqrt(dom.volume());
  for (int l = 1; l < d; ++l) {
    const Eigen::MatrixXd V = member_values(fam.members, samples);
    const Eigen::MatrixXd WV = w.asDiagonal() * V;
    double min_norm = reference_norm;
    for (Eigen::Index a = 0; a < V.cols(); ++a)
      min_norm = std::min(min_norm, std::sqrt(std::max(0.0, V.col(a).dot(WV.col(a)))));

    SphereMap g = [&](const Point& theta) { return projections(WV, samples, member_at(theta)); };
    OddZeroOptions ro = options.root_options;
    // Absolute threshold that keeps the relative residual well under tolerance.
    ro.tolerance = 0.1 * options.tolerance * min_norm * reference_norm;
    ro.reference = seed;
    const OddZeroResult z = find_odd_zero(g, d, l, ro);
    fam.root_residuals.push_back(z.residual);
    fam.members.push_back(member_at(z.theta));
  }

  fam.gram = weighted_gram(member_values(fam.members, samples), samples);
  fill_required_all(fam);
  const double r = fam.max_orthogonality_residual();
  if (!(r <= options.tolerance)) {
    std::ostringstream msg;
    msg << "orthogonality residual " << r << " above " << options.tolerance;
    throw Error(ErrorCode::NoZeroFound, msg.str());
  }
  return fam;
}

TrialFamily symmetric_family(const RectilinearDomain& dom, double lambda, const std::vector<ReflectionMap>& frame,
                             const FamilyOptions& options) {
  check_lambda(lambda);
  const int d = dom.dimension();
  std::array<std::optional<double>, 3> plane;
  for (const auto& map : frame) {
    if (map.axis < 0 || map.axis >= d) throw Error(ErrorCode::SymmetryMissing, "reflection axis out of range");
    if (!is_symmetric(dom, map)) {
      std::ostringstream msg;
      msg << "domain is not symmetric under reflection of axis " << map.axis + 1 << " about "
          << map.plane_offset;
      throw Error(ErrorCode::SymmetryMissing, msg.str());
    }
    if (!plane[map.axis]) plane[map.axis] = map.plane_offset;
  }
  int axis = -1;
  for (int a = 0; a < d && axis < 0; ++a) {
    bool covered = true;
    for (int l = 0; l < d; ++l)
      if (l != a && !plane[l]) covered = false;
    if (covered) axis = a;
  }
  if (axis < 0) {
    std::ostringstream msg;
    msg << "need reflection symmetries in " << d - 1 << " distinct axes";
    throw Error(ErrorCode::SymmetryMissing, msg.str());
  }

  const double omega = std::pow(lambda, 0.25);
  TrialFamily fam;
  fam.kind = FamilyKind::SymmetricTrig;
  fam.dimension = d;
  fam.lambda = lambda;
  fam.distinguished_axis = axis;

  const double mid = plane[axis] ? *plane[axis] : 0.5 * (dom.box_lower()[axis] + dom.box_upper()[axis]);
  for (Phase ph : {Phase::Sine, Phase::Cosine}) {
    TrigMember m;
    m.phase = ph;
    m.frequency[axis] = omega;
    m.origin[axis] = mid;
    fam.members.push_back(m);
  }
  for (int l = 0; l < d; ++l) {
    if (l == axis) continue;
    TrigMember m;
    m.frequency[l] = omega;
    m.origin[l] = *plane[l];
    fam.members.push_back(m);
  }
  const int m = static_cast<int>(fam.members.size());
  for (int l = 2; l < m; ++l) {
    fam.required_pairs.emplace_back(0, l);
    fam.required_pairs.emplace_back(1, l);
  }
  for (int i = 2; i < m; ++i)
    for (int j = i + 1; j < m; ++j) fam.required_pairs.emplace_back(i, j);

  const DomainSamples samples = trig_samples(dom, omega, options.quadrature_points);
  fam.gram = weighted_gram(member_values(fam.members, samples), samples);
  const double r = fam.max_orthogonality_residual();
  if (!(r <= options.tolerance)) {
    std::ostringstream msg;
    msg << "orthogonality residual " << r << " above " << options.tolerance;
    throw Error(ErrorCode::SymmetryMissing, msg.str());
  }
  return fam;
}

IdentityReport check_identities(const TrialFamily& family, const RectilinearDomain& dom,
                                const IdentityOptions& options) {
  if (family.dimension != dom.dimension()) throw Error(ErrorCode::BadDimension, "family and domain dimension differ");
  const int d = dom.dimension();
  const double lambda = family.lambda;
  IdentityReport rep;
  std::mt19937_64 rng(options.seed);

  // Pointwise bilaplacian at random interior points.
  std::uniform_int_distribution<std::size_t> pick_cell(0, dom.cells().size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < options.sample_points; ++i) {
    Point x = dom.cell_origin(dom.cells()[pick_cell(rng)]);
    for (int a = 0; a < d; ++a) x[a] += unit(rng) * dom.cell_size();
    pts.push_back(x);
  }
  for (const auto& v : family.members) {
    double sup = 0.0;
    for (const auto& x : pts) sup = std::max(sup, std::abs(v.value(x)));
    for (const auto& x : pts) {
      double bilap = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          MultiIndex o{0, 0, 0};
          o[i] += 2;
          o[j] += 2;
          bilap += v.derivative(x, o);
        }
      const double denom = lambda * std::max(sup, 1e-300);
      rep.pointwise_residual = std::max(rep.pointwise_residual, std::abs(bilap - lambda * v.value(x)) / denom);
    }
  }
  rep.sample_points = options.sample_points;

  // Hessian-norm identity on random unit combinations.
  const DomainSamples samples = trig_samples(dom, max_frequency(family.members), options.quadrature_points);
  const Eigen::MatrixXd V = member_values(family.members, samples);
  const auto m = static_cast<Eigen::Index>(family.members.size());
  const auto n = static_cast<Eigen::Index>(samples.points.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int c = 0; c < options.combinations; ++c) {
    Eigen::VectorXd coef(m);
    for (Eigen::Index l = 0; l < m; ++l) coef[l] = normal(rng);
    coef.normalize();
    double hess = 0.0;
    double mass = 0.0;
    for (Eigen::Index q = 0; q < n; ++q) {
      const double wq = samples.weights[static_cast<std::size_t>(q)];
      double val = 0.0;
      double hq = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double hij = 0.0;
          for (Eigen::Index l = 0; l < m; ++l) {
            const auto& f = family.members[static_cast<std::size_t>(l)].frequency;
            hij -= coef[l] * f[i] * f[j] * V(q, l);
          }
          hq += hij * hij;
        }
      for (Eigen::Index l = 0; l < m; ++l) val += coef[l] * V(q, l);
      hess += wq * hq;
      mass += wq * val * val;
    }
    const double rel = std::abs(hess - lambda * mass) / (lambda * mass);
    rep.hessian_residual = std::max(rep.hessian_residual, rel);
  }
  rep.combinations = options.combinations;
  return rep;
}

}  // namespace biharm
