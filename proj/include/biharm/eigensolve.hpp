#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "biharm/assembly.hpp"
#include "biharm/mesh.hpp"

namespace biharm {

/// Lowest eigenpairs of a pencil (A, M), eigenvalues non-decreasing with
/// multiplicity, eigenvectors M-orthonormal (free-dof coefficients).
struct SpectrumResult {
  std::vector<double> eigenvalues;
  std::vector<Eigen::VectorXd> eigenvectors;
  /// ||A x - theta M x|| / ||M x|| per pair.
  std::vector<double> residual_norms;
  BoundaryCondition bc = BoundaryCondition::Neumann;
  std::string mesh_id;

  // Diagnostics.
  std::string method;
  int iterations = 0;
  std::size_t kernel_dimension = 0;
  double shift = 0.0;
  /// theta_{count+1} - theta_count, when the solver resolved one more pair.
  double trailing_gap = 0.0;
  double max_residual() const;
};

/// Interpolants of chi_Omega and x_1..x_d, restricted to the free dofs. These
/// span the kernel of the Neumann Hessian form.
struct KernelBasis {
  std::vector<Eigen::VectorXd> members;
};

KernelBasis make_kernel_basis(const MeshDofSystem& mesh);

struct SolverOptions {
  /// Problems with at most this many free dofs use the dense path.
  std::size_t dense_threshold = 3000;
  /// Relative tolerance on Ritz residuals of the shift-inverted operator.
  double tolerance = 1e-10;
  /// Bound on ||D(A x - theta M x)|| / (1 + theta) for M-normalized x, with
  /// D = diag(M)^{-1/2} standing in for M^{-1/2}. Floored at rounding in A.
  double residual_tolerance = 1e-9;
  /// Block iterations before ConvergenceFailure.
  int max_iterations = 500;
  /// The factored operator is A - shift*M; must be negative so that it stays
  /// definite when A is singular.
  double shift = -1.0;
  int block_size = 4;
  std::uint64_t seed = 0x5eedb1a5ULL;
};

/// `count` smallest eigenpairs of A x = theta M x. With a deflation basis the
/// kernel members come first with eigenvalue exactly 0 and the remaining
/// pairs are computed in their M-orthogonal complement.
/// Throws MassNotPD, ConvergenceFailure, CountTooLarge.
SpectrumResult solve_lowest(const SparseSymMatrix& A, const SparseSymMatrix& M, std::size_t count,
                            const KernelBasis* deflation = nullptr, const SolverOptions& options = {});

/// (x^T A x) / (x^T M x). Throws ZeroVector.
double rayleigh_quotient(const SparseSymMatrix& A, const SparseSymMatrix& M, const Eigen::VectorXd& x);

/// Numerical rank of a symmetric positive semi-definite Gram matrix: number of
/// singular values >= tol * largest.
std::size_t gram_rank(const Eigen::MatrixXd& gram, double tol);
/// Rank of the M-Gram matrix of xs.
std::size_t gram_rank(const SparseSymMatrix& M, const std::vector<Eigen::VectorXd>& xs, double tol);

/// ||A x - theta M x|| / ||M x||.
double pencil_residual(const SparseSymMatrix& A, const SparseSymMatrix& M, const Eigen::VectorXd& x, double theta);
/// ||D (A x - theta M x)|| / ||x||_M with D = diag(M)^{-1/2}, a Jacobi proxy
/// for the M^{-1} norm of the residual.
double proxy_residual(const SparseSymMatrix& A, const SparseSymMatrix& M, const Eigen::VectorXd& x, double theta);

}  // namespace biharm
