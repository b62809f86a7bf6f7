#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace biharm {

/// Points and lattice indices are stored in three slots; components beyond
/// the domain dimension are zero.
using Point = std::array<double, 3>;
using LatticeIndex = std::array<long, 3>;

/// Everything needed to build a domain: dimension, base cell size h0, the
/// offset of lattice point (0,..,0) and the list of occupied lattice cells.
/// Cell (i,j) covers [offset + i*h0, offset + (i+1)*h0] x ...
struct DomainDescription {
  int dimension = 2;
  double cell_size = 1.0;
  Point offset{0.0, 0.0, 0.0};
  std::vector<LatticeIndex> cells;
  std::string name;
};

/// Open set given by a finite, face-connected union of axis-aligned lattice
/// cells. Immutable; construct through build_domain().
class RectilinearDomain {
 public:
  int dimension() const { return dimension_; }
  double cell_size() const { return cell_size_; }
  const Point& offset() const { return offset_; }
  /// Occupied cells in lexicographic lattice order.
  const std::vector<LatticeIndex>& cells() const { return cells_; }
  const std::string& name() const { return name_; }

  bool contains_cell(const LatticeIndex& cell) const;
  double volume() const;
  /// Lower corner of a lattice cell in physical coordinates.
  Point cell_origin(const LatticeIndex& cell) const;

  /// Inclusive lattice bounds of the occupied cells per axis.
  const LatticeIndex& lattice_lower() const { return lower_; }
  const LatticeIndex& lattice_upper() const { return upper_; }
  /// Physical bounding box.
  Point box_lower() const;
  Point box_upper() const;

  DomainDescription description() const;

  friend bool operator==(const RectilinearDomain& a, const RectilinearDomain& b) {
    return a.dimension_ == b.dimension_ && a.cell_size_ == b.cell_size_ &&
           a.offset_ == b.offset_ && a.cells_ == b.cells_;
  }

 private:
  friend RectilinearDomain build_domain(const DomainDescription& spec);

  int dimension_ = 2;
  double cell_size_ = 1.0;
  Point offset_{};
  std::vector<LatticeIndex> cells_;
  LatticeIndex lower_{};
  LatticeIndex upper_{};
  std::string name_;
};

/// Validates the description. Throws Error with BadDimension,
/// OverlappingCells (a lattice cell listed twice) or DisconnectedDomain.
RectilinearDomain build_domain(const DomainDescription& spec);

/// Reflection x_axis -> 2*plane_offset - x_axis. `axis` is zero-based.
struct ReflectionMap {
  int axis = 0;
  double plane_offset = 0.0;

  Point apply(const Point& x) const {
    Point y = x;
    y[axis] = 2.0 * plane_offset - x[axis];
    return y;
  }

  friend bool operator==(const ReflectionMap&, const ReflectionMap&) = default;
};

bool is_symmetric(const RectilinearDomain& dom, const ReflectionMap& map);

/// All axis-aligned reflections through bounding-box midplanes that leave the
/// cell set invariant, ordered by axis.
std::vector<ReflectionMap> detect_symmetry_frame(const RectilinearDomain& dom);

// Convenience constructors used by tests and the bundled domain files.
DomainDescription unit_square_description(bool centered);
DomainDescription rectangle_description(long nx, long ny, bool centered);
DomainDescription l_shape_description();
DomainDescription unit_cube_description(bool centered);

}  // namespace biharm
