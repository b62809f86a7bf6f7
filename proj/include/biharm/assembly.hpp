#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "biharm/mesh.hpp"

namespace biharm {

/// Symmetric sparse matrix of an assembled bilinear form on the free dofs of
/// a mesh. Both triangles are stored; entries (p,q) and (q,p) come out of
/// identical arithmetic, so the storage is exactly symmetric.
struct SparseSymMatrix {
  Eigen::SparseMatrix<double> entries;
  std::string mesh_id;

  Eigen::Index order() const { return entries.rows(); }
  double quadratic_form(const Eigen::VectorXd& x) const { return x.dot(entries * x); }
};

/// Dense local matrices of one refined cell, local-dof order.
Eigen::MatrixXd local_hessian_matrix(int dimension, double cell_size);
Eigen::MatrixXd local_mass_matrix(int dimension, double cell_size);

/// A[p,q] = sum_{i,j} int d_ij phi_p d_ij phi_q over the free dofs.
SparseSymMatrix assemble_hessian(const MeshDofSystem& mesh);
/// M[p,q] = int phi_p phi_q over the free dofs.
SparseSymMatrix assemble_mass(const MeshDofSystem& mesh);

/// Coordinate-format text dump ("%%MatrixMarket matrix coordinate real
/// symmetric", lower triangle, 1-based indices) for debugging.
void write_matrix_market(const SparseSymMatrix& m, const std::filesystem::path& path);

}  // namespace biharm
