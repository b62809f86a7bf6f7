#include "biharm/domain.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "biharm/error.hpp"

namespace biharm {

bool RectilinearDomain::contains_cell(const LatticeIndex& cell) const {
  return std::binary_search(cells_.begin(), cells_.end(), cell);
}

double RectilinearDomain::volume() const {
  return static_cast<double>(cells_.size()) * std::pow(cell_size_, dimension_);
}

Point RectilinearDomain::cell_origin(const LatticeIndex& cell) const {
  Point p{};
  for (int a = 0; a < dimension_; ++a) {
    p[a] = offset_[a] + static_cast<double>(cell[a]) * cell_size_;
  }
  return p;
}

Point RectilinearDomain::box_lower() const {
  Point p{};
  for (int a = 0; a < dimension_; ++a) {
    p[a] = offset_[a] + static_cast<double>(lower_[a]) * cell_size_;
  }
  return p;
}

Point RectilinearDomain::box_upper() const {
  Point p{};
  for (int a = 0; a < dimension_; ++a) {
    p[a] = offset_[a] + static_cast<double>(upper_[a] + 1) * cell_size_;
  }
  return p;
}

DomainDescription RectilinearDomain::description() const {
  return DomainDescription{dimension_, cell_size_, offset_, cells_, name_};
}

RectilinearDomain build_domain(const DomainDescription& spec) {
  if (spec.dimension != 2 && spec.dimension != 3) {
    throw Error(ErrorCode::BadDimension,
                "dimension must be 2 or 3, got " + std::to_string(spec.dimension));
  }
  if (!(spec.cell_size > 0.0) || !std::isfinite(spec.cell_size)) {
    throw Error(ErrorCode::BadDimension, "cell_size must be positive and finite");
  }
  if (spec.cells.empty()) {
    throw Error(ErrorCode::DisconnectedDomain, "domain has no cells");
  }
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(spec.offset[a])) {
      throw Error(ErrorCode::NonFiniteValue, "offset is not finite");
    }
  }

  RectilinearDomain dom;
  dom.dimension_ = spec.dimension;
  dom.cell_size_ = spec.cell_size;
  dom.name_ = spec.name;
  for (int a = 0; a < spec.dimension; ++a) dom.offset_[a] = spec.offset[a];

  dom.cells_.reserve(spec.cells.size());
  for (LatticeIndex c : spec.cells) {
    for (int a = spec.dimension; a < 3; ++a) c[a] = 0;
    dom.cells_.push_back(c);
  }
  std::sort(dom.cells_.begin(), dom.cells_.end());
  auto dup = std::adjacent_find(dom.cells_.begin(), dom.cells_.end());
  if (dup != dom.cells_.end()) {
    throw Error(ErrorCode::OverlappingCells,
                "cell (" + std::to_string((*dup)[0]) + "," + std::to_string((*dup)[1]) +
                    "," + std::to_string((*dup)[2]) + ") listed more than once");
  }

  // Face connectivity by breadth-first search over the sorted cell list.
  std::vector<bool> seen(dom.cells_.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const LatticeIndex c = dom.cells_[frontier.front()];
    frontier.pop();
    for (int a = 0; a < spec.dimension; ++a) {
      for (long step : {-1L, 1L}) {
        LatticeIndex n = c;
        n[a] += step;
        auto it = std::lower_bound(dom.cells_.begin(), dom.cells_.end(), n);
        if (it != dom.cells_.end() && *it == n) {
          auto idx = static_cast<std::size_t>(it - dom.cells_.begin());
          if (!seen[idx]) {
            seen[idx] = true;
            ++reached;
            frontier.push(idx);
          }
        }
      }
    }
  }
  if (reached != dom.cells_.size()) {
    throw Error(ErrorCode::DisconnectedDomain,
                std::to_string(dom.cells_.size() - reached) + " cell(s) share no face path with the rest");
  }

  dom.lower_ = dom.cells_.front();
  dom.upper_ = dom.cells_.front();
  for (const auto& c : dom.cells_) {
    for (int a = 0; a < 3; ++a) {
      dom.lower_[a] = std::min(dom.lower_[a], c[a]);
      dom.upper_[a] = std::max(dom.upper_[a], c[a]);
    }
  }
  return dom;
}

bool is_symmetric(const RectilinearDomain& dom, const ReflectionMap& map) {
  if (map.axis < 0 || map.axis >= dom.dimension()) return false;
  const int a = map.axis;
  // Cell i spans [o + i h, o + (i+1) h]; its mirror image starts at
  // 2c - o - (i+1) h, which lies on the lattice iff 2(c - o)/h is an integer.
  const double shift = 2.0 * (map.plane_offset - dom.offset()[a]) / dom.cell_size();
  const double rounded = std::round(shift);
  if (std::abs(shift - rounded) > 1e-9 * std::max(1.0, std::abs(shift))) return false;
  const auto s = static_cast<long>(rounded);
  for (const auto& c : dom.cells()) {
    LatticeIndex m = c;
    m[a] = s - c[a] - 1;
    if (!dom.contains_cell(m)) return false;
  }
  return true;
}

std::vector<ReflectionMap> detect_symmetry_frame(const RectilinearDomain& dom) {
  std::vector<ReflectionMap> frame;
  const Point lo = dom.box_lower();
  const Point hi = dom.box_upper();
  for (int a = 0; a < dom.dimension(); ++a) {
    ReflectionMap m{a, 0.5 * (lo[a] + hi[a])};
    if (is_symmetric(dom, m)) frame.push_back(m);
  }
  return frame;
}

DomainDescription unit_square_description(bool centered) {
  DomainDescription d;
  d.dimension = 2;
  d.cell_size = 1.0;
  d.offset = centered ? Point{-0.5, -0.5, 0.0} : Point{0.0, 0.0, 0.0};
  d.cells = {{0, 0, 0}};
  d.name = centered ? "square_centered" : "square";
  return d;
}

DomainDescription rectangle_description(long nx, long ny, bool centered) {
  DomainDescription d;
  d.dimension = 2;
  d.cell_size = 1.0;
  d.offset = centered ? Point{-0.5 * static_cast<double>(nx), -0.5 * static_cast<double>(ny), 0.0}
                      : Point{0.0, 0.0, 0.0};
  for (long j = 0; j < ny; ++j)
    for (long i = 0; i < nx; ++i) d.cells.push_back({i, j, 0});
  d.name = "rectangle_" + std::to_string(nx) + "x" + std::to_string(ny);
  return d;
}

DomainDescription l_shape_description() {
  DomainDescription d;
  d.dimension = 2;
  d.cell_size = 1.0;
  d.cells = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  d.name = "l_shape";
  return d;
}

DomainDescription unit_cube_description(bool centered) {
  DomainDescription d;
  d.dimension = 3;
  d.cell_size = 1.0;
  d.offset = centered ? Point{-0.5, -0.5, -0.5} : Point{0.0, 0.0, 0.0};
  d.cells = {{0, 0, 0}};
  d.name = centered ? "cube_centered" : "cube";
  return d;
}

}  // namespace biharm
