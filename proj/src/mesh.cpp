#include "biharm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "biharm/error.hpp"

namespace biharm {

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

namespace {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool refined_cell_inside(const RectilinearDomain& dom, int r, const LatticeIndex& c) {
  LatticeIndex base{0, 0, 0};
  for (int a = 0; a < dom.dimension(); ++a) base[a] = floor_div(c[a], r);
  return dom.contains_cell(base);
}

LatticeIndex corner_offset(int corner) {
  return {corner & 1, (corner >> 1) & 1, (corner >> 2) & 1};
}

}  // namespace

std::vector<std::size_t> MeshDofSystem::cell_dofs(std::size_t cell) const {
  const int dpn = dofs_per_node();
  std::vector<std::size_t> dofs;
  dofs.reserve(static_cast<std::size_t>(local_dof_count(dimension())));
  for (std::size_t node : cell_nodes_[cell]) {
    for (int k = 0; k < dpn; ++k) dofs.push_back(global_dof(node, k));
  }
  return dofs;
}

Point MeshDofSystem::node_point(std::size_t node) const {
  Point p{};
  for (int a = 0; a < dimension(); ++a) {
    p[a] = domain_.offset()[a] + static_cast<double>(nodes_[node][a]) * cell_size_;
  }
  return p;
}

Cell MeshDofSystem::cell_geometry(std::size_t cell) const {
  Cell c;
  c.dimension = dimension();
  c.size = cell_size_;
  for (int a = 0; a < dimension(); ++a) {
    c.origin[a] = domain_.offset()[a] + static_cast<double>(cells_[cell][a]) * cell_size_;
  }
  return c;
}

long MeshDofSystem::locate(const Point& x) const {
  const int d = dimension();
  std::array<std::vector<long>, 3> cand;
  for (int a = 0; a < 3; ++a) {
    if (a >= d) {
      cand[a] = {0};
      continue;
    }
    const double t = (x[a] - domain_.offset()[a]) / cell_size_;
    const double r = std::round(t);
    if (std::abs(t - r) <= 1e-12 * std::max(1.0, std::abs(t))) {
      cand[a] = {static_cast<long>(r) - 1, static_cast<long>(r)};
    } else {
      cand[a] = {static_cast<long>(std::floor(t))};
    }
  }
  for (long i : cand[0]) {
    for (long j : cand[1]) {
      for (long k : cand[2]) {
        const LatticeIndex c{i, j, k};
        auto it = std::lower_bound(cells_.begin(), cells_.end(), c);
        if (it != cells_.end() && *it == c) return static_cast<long>(it - cells_.begin());
      }
    }
  }
  return -1;
}

Eigen::VectorXd MeshDofSystem::expand(const Eigen::VectorXd& free) const {
  if (static_cast<std::size_t>(free.size()) != free_count()) {
    throw Error(ErrorCode::MeshMismatch, "free vector length does not match the mesh");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof_count()));
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) {
    g[static_cast<Eigen::Index>(free_dofs_[i])] = free[static_cast<Eigen::Index>(i)];
  }
  return g;
}

Eigen::VectorXd MeshDofSystem::restrict_to_free(const Eigen::VectorXd& global) const {
  if (static_cast<std::size_t>(global.size()) != dof_count()) {
    throw Error(ErrorCode::MeshMismatch, "global vector length does not match the mesh");
  }
  Eigen::VectorXd f(static_cast<Eigen::Index>(free_count()));
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) {
    f[static_cast<Eigen::Index>(i)] = global[static_cast<Eigen::Index>(free_dofs_[i])];
  }
  return f;
}

void MeshDofSystem::rebuild_free_map() {
  free_index_.assign(mask_.size(), -1);
  free_dofs_.clear();
  for (std::size_t g = 0; g < mask_.size(); ++g) {
    if (!mask_[g]) {
      free_index_[g] = static_cast<long>(free_dofs_.size());
      free_dofs_.push_back(g);
    }
  }
}

MeshDofSystem MeshDofSystem::with_mask(std::vector<bool> mask) const {
  if (mask.size() != dof_count()) throw Error(ErrorCode::MeshMismatch, "mask length does not match the mesh");
  MeshDofSystem m = *this;
  m.mask_ = std::move(mask);
  m.rebuild_free_map();
  m.mesh_id_ += "+custom_mask";
  return m;
}

MeshDofSystem build_mesh(const RectilinearDomain& dom, int refinement, BoundaryCondition bc,
                         const MeshOptions& options) {
  if (refinement < 1) throw std::invalid_argument("build_mesh: refinement must be >= 1");
  const int d = dom.dimension();
  const int r = refinement;
  const int ncorner = corners_per_cell(d);

  MeshDofSystem mesh;
  mesh.domain_ = dom;
  mesh.refinement_ = r;
  mesh.bc_ = bc;
  mesh.cell_size_ = dom.cell_size() / r;

  // Cheap upper bound on the node count before allocating anything large.
  const double node_bound = static_cast<double>(dom.cells().size()) * std::pow(r + 1.0, d);
  if (node_bound * dofs_per_node(d) > 4.0 * static_cast<double>(options.dof_cap) + 1e6) {
    throw Error(ErrorCode::RefinementOverflow, "refinement " + std::to_string(r) + " exceeds the dof cap");
  }

  for (const auto& base : dom.cells()) {
    const long rz = d == 3 ? r : 1;
    for (long k = 0; k < rz; ++k) {
      for (long j = 0; j < r; ++j) {
        for (long i = 0; i < r; ++i) {
          LatticeIndex c{base[0] * r + i, base[1] * r + j, d == 3 ? base[2] * r + k : 0};
          mesh.cells_.push_back(c);
        }
      }
    }
  }
  std::sort(mesh.cells_.begin(), mesh.cells_.end());

  for (const auto& c : mesh.cells_) {
    for (int corner = 0; corner < ncorner; ++corner) {
      const LatticeIndex off = corner_offset(corner);
      mesh.nodes_.push_back({c[0] + off[0], c[1] + off[1], c[2] + off[2]});
    }
  }
  std::sort(mesh.nodes_.begin(), mesh.nodes_.end());
  mesh.nodes_.erase(std::unique(mesh.nodes_.begin(), mesh.nodes_.end()), mesh.nodes_.end());

  const std::size_t ndof = mesh.nodes_.size() * static_cast<std::size_t>(dofs_per_node(d));
  if (ndof > options.dof_cap) {
    throw Error(ErrorCode::RefinementOverflow,
                std::to_string(ndof) + " dofs exceed the cap of " + std::to_string(options.dof_cap));
  }

  auto node_index = [&](const LatticeIndex& n) {
    auto it = std::lower_bound(mesh.nodes_.begin(), mesh.nodes_.end(), n);
    return static_cast<std::size_t>(it - mesh.nodes_.begin());
  };
  mesh.cell_nodes_.resize(mesh.cells_.size());
  for (std::size_t ci = 0; ci < mesh.cells_.size(); ++ci) {
    const auto& c = mesh.cells_[ci];
    for (int corner = 0; corner < ncorner; ++corner) {
      const LatticeIndex off = corner_offset(corner);
      mesh.cell_nodes_[ci].push_back(node_index({c[0] + off[0], c[1] + off[1], c[2] + off[2]}));
    }
  }

  // A node lies on a boundary face with normal `a` when two of its incident
  // lattice cells differ only along `a` and exactly one of them is inside.
  const auto& orders = node_dof_orders(d);
  mesh.node_on_boundary_.assign(mesh.nodes_.size(), false);
  mesh.mask_.assign(ndof, false);
  for (std::size_t ni = 0; ni < mesh.nodes_.size(); ++ni) {
    const auto& n = mesh.nodes_[ni];
    std::array<bool, 8> inside{};
    for (int s = 0; s < ncorner; ++s) {
      const LatticeIndex off = corner_offset(s);
      inside[s] = refined_cell_inside(dom, r, {n[0] - off[0], n[1] - off[1], n[2] - off[2]});
    }
    std::array<bool, 3> face_normal{false, false, false};
    for (int s = 0; s < ncorner; ++s) {
      for (int a = 0; a < d; ++a) {
        const int t = s ^ (1 << a);
        if (inside[s] != inside[t]) face_normal[a] = true;
      }
    }
    const bool on_boundary = face_normal[0] || face_normal[1] || face_normal[2];
    mesh.node_on_boundary_[ni] = on_boundary;
    if (bc != BoundaryCondition::Dirichlet || !on_boundary) continue;

    for (int k = 0; k < static_cast<int>(orders.size()); ++k) {
      const MultiIndex& alpha = orders[k];
      const int order = alpha[0] + alpha[1] + alpha[2];
      bool constrain = order <= 1;
      // Mixed derivatives vanish along a face when they differentiate in a
      // direction tangential to it.
      for (int a = 0; a < d && !constrain; ++a) {
        if (!face_normal[a]) continue;
        for (int b = 0; b < d; ++b) {
          if (b != a && alpha[b] > 0) constrain = true;
        }
      }
      if (constrain) mesh.mask_[mesh.global_dof(ni, k)] = true;
    }
  }
  mesh.rebuild_free_map();

  std::ostringstream id;
  id << (dom.name().empty() ? "domain" : dom.name()) << "/d" << d << "/n" << dom.cells().size() << "/r" << r
     << "/" << to_string(bc);
  mesh.mesh_id_ = id.str();
  return mesh;
}

Eigen::VectorXd interpolate_global(const MeshDofSystem& mesh, const HermiteField& f) {
  const auto& orders = node_dof_orders(mesh.dimension());
  Eigen::VectorXd c(static_cast<Eigen::Index>(mesh.dof_count()));
  for (std::size_t n = 0; n < mesh.node_count(); ++n) {
    const Point p = mesh.node_point(n);
    for (int k = 0; k < mesh.dofs_per_node(); ++k) {
      c[static_cast<Eigen::Index>(mesh.global_dof(n, k))] = f(p, orders[k]);
    }
  }
  return c;
}

Eigen::VectorXd interpolate(const MeshDofSystem& mesh, const HermiteField& f) {
  return mesh.restrict_to_free(interpolate_global(mesh, f));
}

double evaluate(const MeshDofSystem& mesh, const Eigen::VectorXd& global_coeffs, const Point& x,
                const MultiIndex& derivative) {
  if (static_cast<std::size_t>(global_coeffs.size()) != mesh.dof_count()) {
    throw Error(ErrorCode::MeshMismatch, "coefficient vector length does not match the mesh");
  }
  const long cell = mesh.locate(x);
  if (cell < 0) throw std::out_of_range("evaluate: point outside the domain");
  const Cell geo = mesh.cell_geometry(static_cast<std::size_t>(cell));
  const auto dofs = mesh.cell_dofs(static_cast<std::size_t>(cell));
  double v = 0.0;
  for (std::size_t l = 0; l < dofs.size(); ++l) {
    v += global_coeffs[static_cast<Eigen::Index>(dofs[l])] * shape_eval(geo, static_cast<int>(l), x, derivative);
  }
  return v;
}

HermiteField constant_field(double c) {
  return [c](const Point&, const MultiIndex& alpha) {
    return (alpha[0] + alpha[1] + alpha[2]) == 0 ? c : 0.0;
  };
}

HermiteField coordinate_field(int axis) {
  std::array<int, 3> powers{0, 0, 0};
  powers[axis] = 1;
  return monomial_field(powers);
}

HermiteField monomial_field(std::array<int, 3> powers) {
  return [powers](const Point& x, const MultiIndex& alpha) {
    double v = 1.0;
    for (int a = 0; a < 3; ++a) {
      const int p = powers[a];
      const int k = alpha[a];
      if (k > p) return 0.0;
      double coeff = 1.0;
      for (int j = 0; j < k; ++j) coeff *= p - j;
      v *= coeff * std::pow(x[a], p - k);
    }
    return v;
  };
}

}  // namespace biharm
