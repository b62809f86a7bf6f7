#include "biharm/assembly.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <vector>

#include "biharm/error.hpp"
#include "biharm/quadrature.hpp"

namespace biharm {
namespace {

// Local basis tabulated at the tensor nodes of a Gauss rule, all derivative
// orders up to two per axis.
struct LocalTabulation {
  int dimension;
  int points_1d;
  std::vector<double> weights_1d;
  Hermite1DTable table;

  LocalTabulation(int dim, int points, double h)
      : dimension(dim), points_1d(points), table(reference_nodes(points), h) {
    const auto g = gauss_legendre(points);
    for (double w : g.weights) weights_1d.push_back(0.5 * h * w);
  }

  static std::vector<double> reference_nodes(int points) {
    const auto g = gauss_legendre(points);
    std::vector<double> t;
    for (double x : g.nodes) t.push_back(0.5 * (x + 1.0));
    return t;
  }
};

template <class Integrand>
Eigen::MatrixXd local_matrix(int dimension, double h, Integrand&& integrand) {
  constexpr int kPoints = 4;  // exact for per-axis degree <= 7
  const LocalTabulation tab(dimension, kPoints, h);
  const int n = local_dof_count(dimension);
  std::vector<std::array<int, 3>> basis(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) basis[static_cast<std::size_t>(l)] = local_axis_basis(dimension, l);

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  const int nz = dimension == 3 ? kPoints : 1;
  for (int qz = 0; qz < nz; ++qz) {
    for (int qy = 0; qy < kPoints; ++qy) {
      for (int qx = 0; qx < kPoints; ++qx) {
        const std::array<int, 3> q{qx, qy, qz};
        double w = tab.weights_1d[qx] * tab.weights_1d[qy];
        if (dimension == 3) w *= tab.weights_1d[qz];
        for (int p = 0; p < n; ++p) {
          for (int r = 0; r < n; ++r) {
            K(p, r) += w * integrand(tab, q, basis[p], basis[r]);
          }
        }
      }
    }
  }
  return K;
}

// Derivative of a tensor basis function at tensor point q.
double tensor_derivative(const LocalTabulation& tab, const std::array<int, 3>& q,
                         const std::array<int, 3>& b, const std::array<int, 3>& der) {
  double v = 1.0;
  for (int a = 0; a < tab.dimension; ++a) {
    v *= tab.table.at(static_cast<std::size_t>(q[a]), b[a], der[a]);
  }
  return v;
}

SparseSymMatrix scatter(const MeshDofSystem& mesh, const Eigen::MatrixXd& local) {
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> triplets;
  const auto n = static_cast<std::size_t>(local.rows());
  triplets.reserve(mesh.cells().size() * n * n);
  const auto& free_index = mesh.free_index();
  for (std::size_t c = 0; c < mesh.cells().size(); ++c) {
    const auto dofs = mesh.cell_dofs(c);
    for (std::size_t p = 0; p < n; ++p) {
      const long fp = free_index[dofs[p]];
      if (fp < 0) continue;
      for (std::size_t r = 0; r < n; ++r) {
        const long fr = free_index[dofs[r]];
        if (fr < 0) continue;
        triplets.emplace_back(fp, fr, local(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(r)));
      }
    }
  }
  SparseSymMatrix m;
  const auto nf = static_cast<Eigen::Index>(mesh.free_count());
  m.entries.resize(nf, nf);
  m.entries.setFromTriplets(triplets.begin(), triplets.end());
  m.entries.makeCompressed();
  m.mesh_id = mesh.mesh_id();
  return m;
}

}  // namespace

Eigen::MatrixXd local_hessian_matrix(int dimension, double cell_size) {
  return local_matrix(dimension, cell_size,
                      [dimension](const LocalTabulation& tab, const std::array<int, 3>& q,
                                  const std::array<int, 3>& bp, const std::array<int, 3>& br) {
                        double s = 0.0;
                        for (int i = 0; i < dimension; ++i) {
                          for (int j = 0; j < dimension; ++j) {
                            std::array<int, 3> der{0, 0, 0};
                            der[i] += 1;
                            der[j] += 1;
                            s += tensor_derivative(tab, q, bp, der) * tensor_derivative(tab, q, br, der);
                          }
                        }
                        return s;
                      });
}

Eigen::MatrixXd local_mass_matrix(int dimension, double cell_size) {
  return local_matrix(dimension, cell_size,
                      [](const LocalTabulation& tab, const std::array<int, 3>& q, const std::array<int, 3>& bp,
                         const std::array<int, 3>& br) {
                        const std::array<int, 3> none{0, 0, 0};
                        return tensor_derivative(tab, q, bp, none) * tensor_derivative(tab, q, br, none);
                      });
}

SparseSymMatrix assemble_hessian(const MeshDofSystem& mesh) {
  return scatter(mesh, local_hessian_matrix(mesh.dimension(), mesh.cell_size()));
}

SparseSymMatrix assemble_mass(const MeshDofSystem& mesh) {
  return scatter(mesh, local_mass_matrix(mesh.dimension(), mesh.cell_size()));
}

void write_matrix_market(const SparseSymMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write '" + path.string() + "'");
  std::size_t nnz = 0;
  for (int k = 0; k < m.entries.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.entries, k); it; ++it) {
      if (it.row() >= it.col()) ++nnz;
    }
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << "% mesh " << m.mesh_id << "\n";
  out << m.order() << ' ' << m.order() << ' ' << nnz << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (int k = 0; k < m.entries.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.entries, k); it; ++it) {
      if (it.row() >= it.col()) out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path.string() + "' failed");
}

}  // namespace biharm
