#ifndef LEVYLAB_GRID_HPP_
#define LEVYLAB_GRID_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace levylab {

// Grid-valued state, one value per cell in row-major (x fastest) order.
using Field = std::vector<double>;
using Point = std::array<double, 2>;

enum class Boundary { periodic, dirichlet };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& name);

// Uniform cell-centred grid on [-L, L)^d, d in {1, 2}. Dirichlet means zero
// ghost values outside the box.
class Grid {
 public:
  Grid(int dim, double half_width, int cells, Boundary boundary);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int cells_per_axis() const { return cells_; }
  Boundary boundary() const { return boundary_; }
  double spacing() const { return spacing_; }
  double cell_volume() const { return volume_; }
  std::size_t size() const { return size_; }

  double coordinate(int i) const { return -half_width_ + (i + 0.5) * spacing_; }
  Point center(std::size_t index) const;
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * cells_ + i;
  }

  // Neighbour of cell `index` along `axis` shifted by +-1. Returns -1 for a
  // Dirichlet ghost cell.
  long neighbor(std::size_t index, int axis, int offset) const;

 private:
  int dim_;
  double half_width_;
  int cells_;
  Boundary boundary_;
  double spacing_;
  double volume_;
  std::size_t size_;
};

// Discrete norms with cell-volume weights.
double l2_norm_squared(const Grid& grid, std::span<const double> u);
double l1_norm(const Grid& grid, std::span<const double> u);
double lp_integral(const Grid& grid, std::span<const double> u, double p);
double sup_norm(std::span<const double> u);
double total_mass(const Grid& grid, std::span<const double> u);
// Sum over interfaces of squared forward differences, ghost cells taken as
// `ghost_value`. Equals ||grad_h u||^2 in the discrete H1 seminorm.
double gradient_norm_squared(const Grid& grid, std::span<const double> u,
                             double ghost_value = 0.0);

}  // namespace levylab

#endif  // LEVYLAB_GRID_HPP_
