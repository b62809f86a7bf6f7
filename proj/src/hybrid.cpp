#include "biharm/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "biharm/assembly.hpp"
#include "biharm/error.hpp"
#include "biharm/parallel.hpp"
#include "biharm/quadrature.hpp"

namespace biharm {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void validate(const HybridBasis& basis) {
  if (!basis.mesh) throw Error(ErrorCode::MeshMismatch, "hybrid basis has no mesh");
  for (const auto& u : basis.fem) {
    if (static_cast<std::size_t>(u.size()) != basis.mesh->free_count()) {
      std::ostringstream msg;
      msg << "vector of length " << u.size() << " does not match mesh " << basis.mesh->mesh_id() << " ("
          << basis.mesh->free_count() << " free dofs)";
      throw Error(ErrorCode::MeshMismatch, msg.str());
    }
  }
  if (basis.family && basis.family->dimension != basis.mesh->dimension())
    throw Error(ErrorCode::MeshMismatch, "trial family and mesh dimension differ");
}

// Derivative components carried through the quadrature: value, then the
// second derivatives d_ij for i <= j.
struct Components {
  std::vector<MultiIndex> orders;
  std::vector<double> hessian_weight;  // 0 for the value, 1 on the diagonal, 2 off it

  explicit Components(int d) {
    orders.push_back({0, 0, 0});
    hessian_weight.push_back(0.0);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        MultiIndex o{0, 0, 0};
        o[i] += 1;
        o[j] += 1;
        orders.push_back(o);
        hessian_weight.push_back(i == j ? 1.0 : 2.0);
      }
  }
  std::size_t size() const { return orders.size(); }
};

struct Blocks {
  MatrixXd h_ft, g_ft, h_tt, g_tt;
  Blocks(Index k, Index m) : h_ft(MatrixXd::Zero(k, m)), g_ft(MatrixXd::Zero(k, m)), h_tt(MatrixXd::Zero(m, m)),
                             g_tt(MatrixXd::Zero(m, m)) {}
};

Blocks quadrature_blocks(const HybridBasis& basis, int points) {
  const MeshDofSystem& mesh = *basis.mesh;
  const TrialFamily& fam = *basis.family;
  const int d = mesh.dimension();
  const double h = mesh.cell_size();
  const auto k = static_cast<Index>(basis.fem.size());
  const auto m = static_cast<Index>(fam.size());

  double wmax = 0.0;
  for (const auto& v : fam.members)
    for (double c : v.frequency) wmax = std::max(wmax, std::abs(c));
  const int sub = trig_subdivisions(h, wmax);
  const auto g = gauss_legendre(points);
  std::vector<double> t1, w1;
  for (int s = 0; s < sub; ++s)
    for (int p = 0; p < points; ++p) {
      t1.push_back((s + 0.5 * (g.nodes[p] + 1.0)) / sub);
      w1.push_back(0.5 * g.weights[p] * h / sub);
    }
  const Hermite1DTable tab(t1, h);
  const std::size_t n1 = t1.size();
  const std::size_t nq = d == 3 ? n1 * n1 * n1 : n1 * n1;

  const Components comp(d);
  const std::size_t nc = comp.size();
  const int nloc = local_dof_count(d);
  std::vector<std::array<int, 3>> axis_basis(static_cast<std::size_t>(nloc));
  for (int p = 0; p < nloc; ++p) axis_basis[static_cast<std::size_t>(p)] = local_axis_basis(d, p);

  // Local basis components at every tensor point, shared by all cells.
  std::vector<double> phi(nq * static_cast<std::size_t>(nloc) * nc);
  std::vector<double> wq(nq);
  std::vector<std::array<std::size_t, 3>> qidx(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const std::array<std::size_t, 3> ix{q % n1, (q / n1) % n1, d == 3 ? q / (n1 * n1) : 0};
    qidx[q] = ix;
    double w = 1.0;
    for (int a = 0; a < d; ++a) w *= w1[ix[a]];
    wq[q] = w;
    for (int p = 0; p < nloc; ++p)
      for (std::size_t c = 0; c < nc; ++c) {
        double v = 1.0;
        for (int a = 0; a < d; ++a) v *= tab.at(ix[a], axis_basis[p][a], comp.orders[c][a]);
        phi[(q * nloc + p) * nc + c] = v;
      }
  }

  std::vector<VectorXd> global;
  for (const auto& u : basis.fem) global.push_back(mesh.expand(u));

  const std::size_t ncell = mesh.cells().size();
  const std::size_t chunks = (ncell + kCellChunk - 1) / kCellChunk;
  std::vector<Blocks> partial(chunks, Blocks(k, m));
  for_each_chunk(ncell, kCellChunk, [&](std::size_t ch, std::size_t b, std::size_t e) {
    Blocks& acc = partial[ch];
    MatrixXd local(nloc, k);
    MatrixXd U(k, static_cast<Index>(nc));
    MatrixXd V(m, static_cast<Index>(nc));
    for (std::size_t c = b; c < e; ++c) {
      const auto dofs = mesh.cell_dofs(c);
      for (int p = 0; p < nloc; ++p)
        for (Index f = 0; f < k; ++f) local(p, f) = global[static_cast<std::size_t>(f)][static_cast<Index>(dofs[p])];
      const Cell cell = mesh.cell_geometry(c);
      for (std::size_t q = 0; q < nq; ++q) {
        Point x = cell.origin;
        for (int a = 0; a < d; ++a) x[a] += t1[qidx[q][a]] * h;
        U.setZero();
        for (int p = 0; p < nloc; ++p) {
          const double* ph = &phi[(q * nloc + p) * nc];
          for (Index f = 0; f < k; ++f) {
            const double coef = local(p, f);
            if (coef == 0.0) continue;
            for (std::size_t cc = 0; cc < nc; ++cc) U(f, static_cast<Index>(cc)) += coef * ph[cc];
          }
        }
        for (Index l = 0; l < m; ++l)
          for (std::size_t cc = 0; cc < nc; ++cc)
            V(l, static_cast<Index>(cc)) = fam.members[static_cast<std::size_t>(l)].derivative(x, comp.orders[cc]);
        const double w = wq[q];
        for (std::size_t cc = 0; cc < nc; ++cc) {
          const auto ci = static_cast<Index>(cc);
          if (cc == 0) {
            acc.g_ft.noalias() += w * U.col(ci) * V.col(ci).transpose();
            acc.g_tt.noalias() += w * V.col(ci) * V.col(ci).transpose();
          } else {
            const double hw = w * comp.hessian_weight[cc];
            acc.h_ft.noalias() += hw * U.col(ci) * V.col(ci).transpose();
            acc.h_tt.noalias() += hw * V.col(ci) * V.col(ci).transpose();
          }
        }
      }
    }
  });
  Blocks total(k, m);
  for (const auto& p : partial) {
    total.h_ft += p.h_ft;
    total.g_ft += p.g_ft;
    total.h_tt += p.h_tt;
    total.g_tt += p.g_tt;
  }
  return total;
}

MatrixXd fem_block(const SparseSymMatrix& A, const std::vector<VectorXd>& fem) {
  const auto k = static_cast<Index>(fem.size());
  MatrixXd B(k, k);
  for (Index j = 0; j < k; ++j) {
    const VectorXd Au = A.entries * fem[static_cast<std::size_t>(j)];
    for (Index i = 0; i < k; ++i) B(i, j) = fem[static_cast<std::size_t>(i)].dot(Au);
  }
  return 0.5 * (B + B.transpose());
}

RestrictedPencil assemble_pencil(const HybridBasis& basis, int points, bool with_stiffness) {
  validate(basis);
  const auto k = static_cast<Index>(basis.fem.size());
  const auto m = static_cast<Index>(basis.family ? basis.family->size() : 0);
  RestrictedPencil out;
  out.gram = MatrixXd::Zero(k + m, k + m);
  out.stiffness = MatrixXd::Zero(k + m, k + m);
  if (k > 0) {
    out.gram.topLeftCorner(k, k) = fem_block(assemble_mass(*basis.mesh), basis.fem);
    if (with_stiffness) out.stiffness.topLeftCorner(k, k) = fem_block(assemble_hessian(*basis.mesh), basis.fem);
  }
  if (m > 0) {
    const Blocks b = quadrature_blocks(basis, points);
    out.gram.topRightCorner(k, m) = b.g_ft;
    out.gram.bottomLeftCorner(m, k) = b.g_ft.transpose();
    out.gram.bottomRightCorner(m, m) = 0.5 * (b.g_tt + b.g_tt.transpose());
    if (with_stiffness) {
      out.stiffness.topRightCorner(k, m) = b.h_ft;
      out.stiffness.bottomLeftCorner(m, k) = b.h_ft.transpose();
      out.stiffness.bottomRightCorner(m, m) = 0.5 * (b.h_tt + b.h_tt.transpose());
    }
  }
  return out;
}

}  // namespace

double evaluate(const HybridBasis& basis, const HybridVector& coeffs, const Point& x, const MultiIndex& derivative) {
  validate(basis);
  if (static_cast<std::size_t>(coeffs.fem.size()) != basis.fem.size() ||
      static_cast<std::size_t>(coeffs.trig.size()) != (basis.family ? basis.family->size() : 0))
    throw Error(ErrorCode::MeshMismatch, "coefficient count does not match the hybrid basis");
  double s = 0.0;
  if (!basis.fem.empty()) {
    VectorXd u = VectorXd::Zero(static_cast<Index>(basis.mesh->free_count()));
    for (std::size_t i = 0; i < basis.fem.size(); ++i) u += coeffs.fem[static_cast<Index>(i)] * basis.fem[i];
    s += biharm::evaluate(*basis.mesh, basis.mesh->expand(u), x, derivative);
  }
  if (basis.family)
    for (std::size_t l = 0; l < basis.family->size(); ++l)
      s += coeffs.trig[static_cast<Index>(l)] * basis.family->members[l].derivative(x, derivative);
  return s;
}

RestrictedPencil restricted_pencil(const HybridBasis& basis, int quadrature_points) {
  return assemble_pencil(basis, quadrature_points, true);
}

MatrixXd hybrid_gram(const HybridBasis& basis, int quadrature_points) {
  return assemble_pencil(basis, quadrature_points, false).gram;
}

SupRayleighResult sup_rayleigh(const RestrictedPencil& pencil, double rank_tol) {
  SupRayleighResult res;
  res.pencil = pencil;
  const Index n = pencil.gram.rows();
  res.size = static_cast<std::size_t>(n);
  if (n == 0) throw Error(ErrorCode::RankDeficientSubspace, "empty subspace");
  VectorXd s(n);
  for (Index i = 0; i < n; ++i) {
    const double g = pencil.gram(i, i);
    if (!(g > 0.0)) throw Error(ErrorCode::RankDeficientSubspace, "subspace contains a zero function");
    s[i] = 1.0 / std::sqrt(g);
  }
  const MatrixXd G = s.asDiagonal() * pencil.gram * s.asDiagonal();
  const MatrixXd H = s.asDiagonal() * pencil.stiffness * s.asDiagonal();
  res.gram_rank = gram_rank(G, rank_tol);
  if (res.gram_rank < res.size) {
    std::ostringstream msg;
    msg << "Gram rank " << res.gram_rank << " below span size " << res.size;
    throw Error(ErrorCode::RankDeficientSubspace, msg.str());
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(H, G);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::RankDeficientSubspace, "restricted Gram matrix not definite");
  res.sup = es.eigenvalues()[n - 1];
  return res;
}

SupRayleighResult subspace_sup_rayleigh(const SpectrumResult& spectrum, const MeshDofSystem& mesh,
                                        const TrialFamily& family, std::size_t k, double rank_tol) {
  if (spectrum.mesh_id != mesh.mesh_id())
    throw Error(ErrorCode::MeshMismatch, "spectrum computed on " + spectrum.mesh_id + ", mesh is " + mesh.mesh_id());
  if (k == 0 || k > spectrum.eigenvectors.size()) {
    std::ostringstream msg;
    msg << "k = " << k << " outside the " << spectrum.eigenvectors.size() << " available eigenvectors";
    throw Error(ErrorCode::CountTooLarge, msg.str());
  }
  HybridBasis basis;
  basis.mesh = &mesh;
  basis.fem.assign(spectrum.eigenvectors.begin(), spectrum.eigenvectors.begin() + static_cast<long>(k));
  basis.family = &family;
  SupRayleighResult res = sup_rayleigh(restricted_pencil(basis), rank_tol);

  const auto kk = static_cast<Index>(k);
  const double theta = family.lambda;
  for (Index i = 0; i < kk; ++i) {
    const double ui = std::sqrt(res.pencil.gram(i, i));
    for (Index l = 0; l < static_cast<Index>(family.size()); ++l) {
      const double vl = std::sqrt(res.pencil.gram(kk + l, kk + l));
      const double r = std::abs(res.pencil.stiffness(i, kk + l) - theta * res.pencil.gram(i, kk + l));
      const double denom = std::max(theta, 1.0) * ui * vl;
      res.cross_term_residual = std::max(res.cross_term_residual, r / denom);
    }
  }
  return res;
}

}  // namespace biharm
