#include "biharm/eigensolve.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "biharm/error.hpp"

namespace biharm {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Symmetric Jacobi scaling D = diag(M)^{-1/2}. The pencil (DAD, DMD) has the
// same eigenvalues and eigenvectors D^{-1} x; it removes the h-dependent
// scaling of the derivative dofs before any factorization.
struct ScaledPencil {
  SpMat A;
  SpMat M;
  VectorXd d;  // diagonal of D
};

ScaledPencil scale_pencil(const SpMat& A, const SpMat& M) {
  ScaledPencil s;
  s.d.resize(M.rows());
  for (Index i = 0; i < M.rows(); ++i) {
    const double mii = M.coeff(i, i);
    if (!(mii > 0.0)) throw Error(ErrorCode::MassNotPD, "mass matrix has a non-positive diagonal entry");
    s.d[i] = 1.0 / std::sqrt(mii);
  }
  const auto D = s.d.asDiagonal();
  s.A = D * A * D;
  s.M = D * M * D;
  return s;
}

// M-orthonormalizes the columns of X in place (modified Gram-Schmidt, two
// passes). Returns false if a column is numerically dependent.
bool m_orthonormalize(MatrixXd& X, const SpMat& M) {
  for (Index j = 0; j < X.cols(); ++j) {
    const double before = std::sqrt(std::max(0.0, X.col(j).dot(M * X.col(j))));
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) {
        const double c = X.col(i).dot(M * X.col(j));
        X.col(j) -= c * X.col(i);
      }
    }
    const double norm = std::sqrt(std::max(0.0, X.col(j).dot(M * X.col(j))));
    if (!(norm > 1e-12 * before) || norm == 0.0) return false;
    X.col(j) /= norm;
  }
  return true;
}

// W <- W - B (B^T M W), twice. B has M-orthonormal columns.
void project_out(MatrixXd& W, const MatrixXd& B, const SpMat& M) {
  if (B.cols() == 0 || W.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const MatrixXd MW = M * W;
    const MatrixXd C = B.transpose() * MW;
    W.noalias() -= B * C;
  }
}

// Final Rayleigh-Ritz on span(X) with the unscaled pencil: returns sorted
// eigenvalues and M-orthonormal vectors spanning the same space.
void rayleigh_ritz(const SpMat& A, const SpMat& M, MatrixXd& X, std::vector<double>& theta) {
  if (X.cols() == 0) {
    theta.clear();
    return;
  }
  const MatrixXd MX = M * X;
  const MatrixXd AX = A * X;
  MatrixXd G = X.transpose() * MX;
  MatrixXd H = X.transpose() * AX;
  G = 0.5 * (G + G.transpose()).eval();
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(H, G);
  if (ges.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "Ritz basis lost linear independence");
  }
  X = (X * ges.eigenvectors()).eval();
  theta.assign(ges.eigenvalues().data(), ges.eigenvalues().data() + ges.eigenvalues().size());
}

struct RawPairs {
  MatrixXd vectors;  // scaled coordinates
  std::vector<double> values;
  int iterations = 0;
};

RawPairs dense_shift_invert(const ScaledPencil& p, const MatrixXd& kernel_scaled, Index want, double shift) {
  const Index n = p.A.rows();
  MatrixXd K = MatrixXd(p.A) - shift * MatrixXd(p.M);
  lapack_int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n), K.data(),
                                   static_cast<lapack_int>(n));
  if (info != 0) throw Error(ErrorCode::MassNotPD, "shifted pencil A - shift*M is not positive definite");

  // B = L^{-1} M L^{-T}; eigenvalues nu = 1/(theta - shift), largest first.
  MatrixXd B = MatrixXd(p.M);
  info = LAPACKE_dsygst(LAPACK_COL_MAJOR, 1, 'L', static_cast<lapack_int>(n), B.data(),
                        static_cast<lapack_int>(n), K.data(), static_cast<lapack_int>(n));
  if (info != 0) throw Error(ErrorCode::ConvergenceFailure, "dsygst failed");
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) B(i, j) = B(j, i);

  const MatrixXd Lt = K.transpose();
  const auto LT = Lt.triangularView<Eigen::Upper>();
  if (kernel_scaled.cols() > 0) {
    // In y = L^T x coordinates the kernel is an invariant subspace of B;
    // projecting it out sends those eigenvalues to zero, below every wanted one.
    MatrixXd Y = LT * kernel_scaled;
    Eigen::HouseholderQR<MatrixXd> qr(Y);
    Y = qr.householderQ() * MatrixXd::Identity(n, kernel_scaled.cols());
    const MatrixXd BY = B * Y;
    const MatrixXd YBY = Y.transpose() * BY;
    B -= Y * BY.transpose();
    B -= BY * Y.transpose();
    B += Y * YBY * Y.transpose();
    B = 0.5 * (B + B.transpose()).eval();
  }

  const auto il = static_cast<lapack_int>(n - want + 1);
  const auto iu = static_cast<lapack_int>(n);
  lapack_int found = 0;
  std::vector<double> w(static_cast<std::size_t>(n));
  MatrixXd Z(n, want);
  std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * want));
  info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', static_cast<lapack_int>(n), B.data(),
                        static_cast<lapack_int>(n), 0.0, 0.0, il, iu, 0.0, &found, w.data(), Z.data(),
                        static_cast<lapack_int>(n), isuppz.data());
  if (info != 0 || found != want) throw Error(ErrorCode::ConvergenceFailure, "dsyevr failed");

  RawPairs out;
  out.vectors = LT.solve(Z);
  out.values.resize(static_cast<std::size_t>(want));
  for (Index j = 0; j < want; ++j) out.values[static_cast<std::size_t>(j)] = shift + 1.0 / w[static_cast<std::size_t>(j)];
  return out;
}

// Block Krylov-Schur iteration on T = (A - shift M)^{-1} M, self-adjoint in
// the M inner product. The basis is kept M-orthonormal with full
// reorthogonalization; restarts keep the leading Ritz vectors.
RawPairs sparse_shift_invert(const ScaledPencil& p, const MatrixXd& kernel, Index want,
                             const SolverOptions& opt) {
  const Index n = p.A.rows();
  const SpMat K = p.A - opt.shift * p.M;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(K);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
    throw Error(ErrorCode::MassNotPD, "shifted pencil A - shift*M is not positive definite");
  }
  // Deflated operator: the kernel component T picks up through rounding is
  // removed so the iteration stays in the M-orthogonal complement.
  auto apply_T = [&](const MatrixXd& X) -> MatrixXd {
    MatrixXd Y = ldlt.solve(MatrixXd(p.M * X));
    project_out(Y, kernel, p.M);
    return Y;
  };

  // Pencil residuals cannot drop below rounding in A; Gershgorin bounds ||A||.
  double a_norm = 0.0;
  {
    VectorXd rows = VectorXd::Zero(n);
    for (Index c = 0; c < p.A.outerSize(); ++c)
      for (SpMat::InnerIterator it(p.A, c); it; ++it) rows[it.row()] += std::abs(it.value());
    a_norm = rows.maxCoeff();
  }
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * a_norm;

  const Index b = std::max<Index>(1, std::min<Index>(opt.block_size, n - kernel.cols()));
  const Index max_basis =
      std::min<Index>(n - kernel.cols(), std::max<Index>(60, 6 * (want + b)));

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_block = [&](Index cols) {
    MatrixXd R(n, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < n; ++i) R(i, j) = normal(rng);
    return R;
  };

  MatrixXd Q(n, 0);
  MatrixXd TQ(n, 0);
  MatrixXd H(0, 0);

  // Orthonormalizes a candidate block against kernel and basis; columns that
  // collapse (invariant subspace reached) are replaced by random directions.
  auto next_block = [&](MatrixXd W) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      project_out(W, kernel, p.M);
      project_out(W, Q, p.M);
      if (m_orthonormalize(W, p.M)) return W;
      W = random_block(W.cols());
    }
    throw Error(ErrorCode::ConvergenceFailure, "could not extend the Krylov basis");
  };

  MatrixXd P = next_block(random_block(b));
  RawPairs out;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    out.iterations = iter;
    const MatrixXd TP = apply_T(P);
    const Index m0 = Q.cols();
    const Index nb = P.cols();
    Q.conservativeResize(n, m0 + nb);
    Q.rightCols(nb) = P;
    TQ.conservativeResize(n, m0 + nb);
    TQ.rightCols(nb) = TP;

    const MatrixXd MTP = p.M * TP;
    const MatrixXd Hcol = Q.transpose() * MTP;  // (m0+nb) x nb
    H.conservativeResize(m0 + nb, m0 + nb);
    H.rightCols(nb) = Hcol;
    H.bottomLeftCorner(nb, m0) = Hcol.topRows(m0).transpose();
    H.bottomRightCorner(nb, nb) = 0.5 * (Hcol.bottomRows(nb) + Hcol.bottomRows(nb).transpose());

    const Index m = Q.cols();
    const bool exhausted = m + kernel.cols() >= n;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
    // Descending Ritz values of T correspond to ascending theta.
    const Index use = std::min(want, m);
    bool converged = m >= want;
    MatrixXd S(m, use);
    for (Index j = 0; j < use; ++j) S.col(j) = es.eigenvectors().col(m - 1 - j);
    if (converged && !exhausted) {
      const MatrixXd X = Q * S;
      const MatrixXd R = TQ * S;
      for (Index j = 0; j < use && converged; ++j) {
        const double nu = es.eigenvalues()[m - 1 - j];
        const VectorXd r = R.col(j) - nu * X.col(j);
        const double rn = std::sqrt(std::max(0.0, r.dot(p.M * r)));
        if (rn > opt.tolerance * std::abs(nu)) converged = false;
        // In scaled coordinates the Euclidean norm is a Jacobi proxy for the
        // M^{-1} norm; x is M-normalized.
        const double theta = opt.shift + 1.0 / nu;
        const VectorXd x = X.col(j);
        const double rp = (p.A * x - theta * (p.M * x)).norm();
        if (rp > std::max(opt.residual_tolerance * (1.0 + std::abs(theta)), floor)) converged = false;
      }
    }
    if (converged || exhausted) {
      out.vectors = Q * S;
      out.values.resize(static_cast<std::size_t>(use));
      for (Index j = 0; j < use; ++j) out.values[static_cast<std::size_t>(j)] = opt.shift + 1.0 / es.eigenvalues()[m - 1 - j];
      return out;
    }

    P = next_block(TP);
    if (Q.cols() + P.cols() > max_basis) {
      const Index keep = std::min<Index>(m, std::max<Index>(want + 2 * b, max_basis / 2));
      MatrixXd Sk(m, keep);
      for (Index j = 0; j < keep; ++j) Sk.col(j) = es.eigenvectors().col(m - 1 - j);
      Q = (Q * Sk).eval();
      TQ = (TQ * Sk).eval();
      H = MatrixXd::Zero(keep, keep);
      for (Index j = 0; j < keep; ++j) H(j, j) = es.eigenvalues()[m - 1 - j];
    }
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "Ritz residuals above tolerance after " + std::to_string(opt.max_iterations) + " block iterations");
}

}  // namespace

double SpectrumResult::max_residual() const {
  double r = 0.0;
  for (double v : residual_norms) r = std::max(r, v);
  return r;
}

KernelBasis make_kernel_basis(const MeshDofSystem& mesh) {
  KernelBasis k;
  k.members.push_back(interpolate(mesh, constant_field(1.0)));
  for (int a = 0; a < mesh.dimension(); ++a) k.members.push_back(interpolate(mesh, coordinate_field(a)));
  return k;
}

double pencil_residual(const SparseSymMatrix& A, const SparseSymMatrix& M, const VectorXd& x, double theta) {
  const VectorXd Mx = M.entries * x;
  const double denom = Mx.norm();
  if (denom == 0.0) throw Error(ErrorCode::ZeroVector, "residual of a zero vector");
  return (A.entries * x - theta * Mx).norm() / denom;
}

double proxy_residual(const SparseSymMatrix& A, const SparseSymMatrix& M, const VectorXd& x, double theta) {
  const VectorXd Mx = M.entries * x;
  const double mnorm = std::sqrt(std::max(0.0, x.dot(Mx)));
  if (mnorm == 0.0) throw Error(ErrorCode::ZeroVector, "residual of a zero vector");
  const VectorXd r = A.entries * x - theta * Mx;
  return (r.array() / M.entries.diagonal().array().sqrt()).matrix().norm() / mnorm;
}

SpectrumResult solve_lowest(const SparseSymMatrix& A, const SparseSymMatrix& M, std::size_t count,
                            const KernelBasis* deflation, const SolverOptions& options) {
  const Index n = A.order();
  if (M.order() != n) throw Error(ErrorCode::MeshMismatch, "A and M have different orders");
  if (count == 0) throw Error(ErrorCode::CountTooLarge, "count must be positive");
  if (count > static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::CountTooLarge,
                "requested " + std::to_string(count) + " pairs from " + std::to_string(n) + " free dofs");
  }
  if (!(options.shift < 0.0)) throw std::invalid_argument("solve_lowest: shift must be negative");

  {
    Eigen::SimplicialLLT<SpMat> llt(M.entries);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::MassNotPD, "Cholesky of the mass matrix failed");
  }

  SpectrumResult res;
  res.mesh_id = A.mesh_id;
  res.shift = options.shift;

  // Kernel members, M-orthonormalized.
  MatrixXd Z(n, 0);
  if (deflation != nullptr && !deflation->members.empty()) {
    Z.resize(n, static_cast<Index>(deflation->members.size()));
    for (std::size_t j = 0; j < deflation->members.size(); ++j) {
      if (deflation->members[j].size() != n) throw Error(ErrorCode::MeshMismatch, "kernel member has wrong length");
      Z.col(static_cast<Index>(j)) = deflation->members[j];
    }
    if (!m_orthonormalize(Z, M.entries)) {
      throw Error(ErrorCode::KernelDefect, "kernel members are linearly dependent in the mass inner product");
    }
  }
  const Index pk = Z.cols();
  res.kernel_dimension = static_cast<std::size_t>(pk);

  const Index kernel_taken = std::min<Index>(pk, static_cast<Index>(count));
  const Index count_rest = static_cast<Index>(count) - kernel_taken;
  if (count_rest > n - pk) throw Error(ErrorCode::CountTooLarge, "count exceeds the deflated space");
  const Index want = count_rest > 0 ? std::min<Index>(count_rest + 1, n - pk) : 0;

  MatrixXd X(n, 0);
  std::vector<double> theta;
  if (want > 0) {
    const ScaledPencil sp = scale_pencil(A.entries, M.entries);
    const MatrixXd Zs = sp.d.cwiseInverse().asDiagonal() * Z;
    RawPairs raw;
    if (static_cast<std::size_t>(n) <= options.dense_threshold) {
      res.method = "dense";
      raw = dense_shift_invert(sp, Zs, want, options.shift);
    } else {
      res.method = "block-krylov-shift-invert";
      MatrixXd Zsn = Zs;
      if (Zsn.cols() > 0 && !m_orthonormalize(Zsn, sp.M)) {
        throw Error(ErrorCode::KernelDefect, "kernel members are linearly dependent");
      }
      raw = sparse_shift_invert(sp, Zsn, want, options);
    }
    res.iterations = raw.iterations;
    X = sp.d.asDiagonal() * raw.vectors;
    project_out(X, Z, M.entries);
    rayleigh_ritz(A.entries, M.entries, X, theta);
  } else {
    res.method = "kernel-only";
  }

  for (Index j = 0; j < kernel_taken; ++j) {
    res.eigenvalues.push_back(0.0);
    res.eigenvectors.emplace_back(Z.col(j));
  }
  for (Index j = 0; j < count_rest; ++j) {
    res.eigenvalues.push_back(theta[static_cast<std::size_t>(j)]);
    res.eigenvectors.emplace_back(X.col(j));
  }
  if (want > count_rest && count_rest > 0) {
    res.trailing_gap = theta[static_cast<std::size_t>(count_rest)] - theta[static_cast<std::size_t>(count_rest - 1)];
  }
  for (std::size_t j = 0; j < res.eigenvalues.size(); ++j) {
    res.residual_norms.push_back(pencil_residual(A, M, res.eigenvectors[j], res.eigenvalues[j]));
  }
  return res;
}

double rayleigh_quotient(const SparseSymMatrix& A, const SparseSymMatrix& M, const VectorXd& x) {
  if (x.size() != A.order() || x.size() != M.order()) throw Error(ErrorCode::MeshMismatch, "vector length mismatch");
  const double den = x.dot(M.entries * x);
  if (x.norm() == 0.0 || !(den > 0.0)) throw Error(ErrorCode::ZeroVector, "Rayleigh quotient of a zero vector");
  return x.dot(A.entries * x) / den;
}

std::size_t gram_rank(const MatrixXd& gram, double tol) {
  if (gram.rows() == 0) return 0;
  const MatrixXd G = 0.5 * (gram + gram.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G, Eigen::EigenvaluesOnly);
  const VectorXd s = es.eigenvalues().cwiseAbs();
  const double largest = s.maxCoeff();
  if (largest == 0.0) return 0;
  std::size_t rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] >= tol * largest) ++rank;
  return rank;
}

std::size_t gram_rank(const SparseSymMatrix& M, const std::vector<VectorXd>& xs, double tol) {
  const auto k = static_cast<Index>(xs.size());
  MatrixXd G(k, k);
  for (Index i = 0; i < k; ++i) {
    const VectorXd Mx = M.entries * xs[static_cast<std::size_t>(i)];
    for (Index j = 0; j < k; ++j) G(j, i) = xs[static_cast<std::size_t>(j)].dot(Mx);
  }
  return gram_rank(G, tol);
}

}  // namespace biharm
