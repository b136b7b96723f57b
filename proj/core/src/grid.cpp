#include "levylab/grid.hpp"

#include <cmath>

#include "levylab/errors.hpp"

namespace levylab {

std::string to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "dirichlet";
}

Boundary boundary_from_string(const std::string& name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "dirichlet") return Boundary::dirichlet;
  throw Error("unknown boundary condition '" + name + "'");
}

Grid::Grid(int dim, double half_width, int cells, Boundary boundary)
    : dim_(dim), half_width_(half_width), cells_(cells), boundary_(boundary) {
  if (dim != 1 && dim != 2) throw Error("grid dimension must be 1 or 2");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error("grid half-width must be positive and finite");
  }
  if (cells < 1) throw Error("grid needs at least one cell per axis");
  spacing_ = 2.0 * half_width / cells;
  volume_ = dim == 1 ? spacing_ : spacing_ * spacing_;
  size_ = dim == 1 ? static_cast<std::size_t>(cells)
                   : static_cast<std::size_t>(cells) * cells;
}

Point Grid::center(std::size_t index) const {
  const int i = static_cast<int>(index % cells_);
  if (dim_ == 1) return {coordinate(i), 0.0};
  const int j = static_cast<int>(index / cells_);
  return {coordinate(i), coordinate(j)};
}

long Grid::neighbor(std::size_t index, int axis, int offset) const {
  int i = static_cast<int>(index % cells_);
  int j = dim_ == 2 ? static_cast<int>(index / cells_) : 0;
  int& k = axis == 0 ? i : j;
  k += offset;
  if (k < 0 || k >= cells_) {
    if (boundary_ == Boundary::dirichlet) return -1;
    k = (k + cells_) % cells_;
  }
  return static_cast<long>(this->index(i, j));
}

double l2_norm_squared(const Grid& grid, std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return s * grid.cell_volume();
}

double l1_norm(const Grid& grid, std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += std::abs(v);
  return s * grid.cell_volume();
}

double lp_integral(const Grid& grid, std::span<const double> u, double p) {
  double s = 0.0;
  for (double v : u) s += std::pow(std::abs(v), p);
  return s * grid.cell_volume();
}

double sup_norm(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s = std::max(s, std::abs(v));
  return s;
}

double total_mass(const Grid& grid, std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v;
  return s * grid.cell_volume();
}

double gradient_norm_squared(const Grid& grid, std::span<const double> u,
                             double ghost_value) {
  const double h = grid.spacing();
  double s = 0.0;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const long right = grid.neighbor(c, axis, +1);
      const double ur = right < 0 ? ghost_value : u[right];
      const double d = (ur - u[c]) / h;
      s += d * d;
      // The interface between the left ghost and the first cell.
      if (grid.boundary() == Boundary::dirichlet &&
          grid.neighbor(c, axis, -1) < 0) {
        const double dl = (u[c] - ghost_value) / h;
        s += dl * dl;
      }
    }
  }
  return s * grid.cell_volume();
}

}  // namespace levylab
