#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "biharm/domain.hpp"
#include "biharm/hermite.hpp"

namespace biharm {

enum class BoundaryCondition { Dirichlet, Neumann };

std::string to_string(BoundaryCondition bc);

struct MeshOptions {
  std::size_t dof_cap = 200000;
};

/// Uniformly refined cell mesh of a RectilinearDomain with the global
/// Bogner-Fox-Schmit dof map. Node and dof numbering depend only on
/// (domain, refinement); the boundary condition only changes the mask, so
/// the Dirichlet free dofs are a subset of the Neumann ones.
class MeshDofSystem {
 public:
  const RectilinearDomain& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }
  int refinement() const { return refinement_; }
  BoundaryCondition bc() const { return bc_; }
  /// Edge length of a refined cell.
  double cell_size() const { return cell_size_; }
  int dofs_per_node() const { return biharm::dofs_per_node(dimension()); }

  /// Refined-lattice coordinates of the nodes, sorted.
  const std::vector<LatticeIndex>& nodes() const { return nodes_; }
  const std::vector<bool>& node_on_boundary() const { return node_on_boundary_; }
  /// Refined cells, sorted, and their corner node indices (corner order).
  const std::vector<LatticeIndex>& cells() const { return cells_; }
  const std::vector<std::size_t>& cell_corner_nodes(std::size_t cell) const { return cell_nodes_[cell]; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t dof_count() const { return nodes_.size() * static_cast<std::size_t>(dofs_per_node()); }
  std::size_t free_count() const { return free_dofs_.size(); }

  const std::vector<bool>& dirichlet_mask() const { return mask_; }
  /// Global dof -> free index, or -1 when masked.
  const std::vector<long>& free_index() const { return free_index_; }
  const std::vector<std::size_t>& free_dofs() const { return free_dofs_; }

  std::size_t global_dof(std::size_t node, int node_dof) const {
    return node * static_cast<std::size_t>(dofs_per_node()) + static_cast<std::size_t>(node_dof);
  }
  /// Global dofs of a cell in local-dof order.
  std::vector<std::size_t> cell_dofs(std::size_t cell) const;

  Point node_point(std::size_t node) const;
  Cell cell_geometry(std::size_t cell) const;
  /// Index of the refined cell containing x (boundary points go to the lowest
  /// adjacent cell), or -1 when x is outside the closure of the domain.
  long locate(const Point& x) const;

  /// Free-dof vector -> global vector (masked entries zero), and back.
  Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& global) const;

  /// Identifies (domain, refinement, bc) for provenance and mismatch checks.
  const std::string& mesh_id() const { return mesh_id_; }
  /// True when both meshes discretize the same domain at the same refinement,
  /// i.e. they share node and global dof numbering.
  bool same_discretization(const MeshDofSystem& other) const {
    return refinement_ == other.refinement_ && domain_ == other.domain_;
  }

  /// Copy of this mesh with a caller-supplied constraint mask. Used for the
  /// alternative constraint variants and for fault injection in tests.
  MeshDofSystem with_mask(std::vector<bool> mask) const;

 private:
  friend MeshDofSystem build_mesh(const RectilinearDomain&, int, BoundaryCondition, const MeshOptions&);
  void rebuild_free_map();

  RectilinearDomain domain_;
  int refinement_ = 1;
  BoundaryCondition bc_ = BoundaryCondition::Neumann;
  double cell_size_ = 1.0;
  std::vector<LatticeIndex> nodes_;
  std::vector<bool> node_on_boundary_;
  std::vector<LatticeIndex> cells_;
  std::vector<std::vector<std::size_t>> cell_nodes_;
  std::vector<bool> mask_;
  std::vector<long> free_index_;
  std::vector<std::size_t> free_dofs_;
  std::string mesh_id_;
};

/// Throws RefinementOverflow when the global dof count exceeds
/// options.dof_cap, std::invalid_argument for refinement < 1.
MeshDofSystem build_mesh(const RectilinearDomain& dom, int refinement, BoundaryCondition bc,
                         const MeshOptions& options = {});

/// Smooth field that can report the mixed derivatives the Hermite dofs need.
using HermiteField = std::function<double(const Point&, const MultiIndex&)>;

/// Nodal Hermite interpolant: global coefficient vector (all dofs).
Eigen::VectorXd interpolate_global(const MeshDofSystem& mesh, const HermiteField& f);
/// Same, restricted to the free dofs of the mesh.
Eigen::VectorXd interpolate(const MeshDofSystem& mesh, const HermiteField& f);

/// Value or derivative (total order <= 2) of a global coefficient vector at x.
double evaluate(const MeshDofSystem& mesh, const Eigen::VectorXd& global_coeffs, const Point& x,
                const MultiIndex& derivative = {0, 0, 0});

// Fields used throughout: constants, coordinate functions, tensor monomials.
HermiteField constant_field(double c);
HermiteField coordinate_field(int axis);
/// prod_a x_a^powers[a]
HermiteField monomial_field(std::array<int, 3> powers);

}  // namespace biharm
