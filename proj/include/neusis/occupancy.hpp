#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neusis/geometry.hpp"

namespace neusis {

// Dense boolean voxel volume anchored at z = 0. An empty grid (any dimension
// zero) behaves as all-free space with ground height 0.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(Vec2 origin, double cell_size, int nx, int ny, int nz)
      : origin_(origin),
        cell_size_(cell_size),
        nx_(nx),
        ny_(ny),
        nz_(nz),
        cells_(static_cast<std::size_t>(std::max(0, nx)) * std::max(0, ny) *
                   std::max(0, nz),
               0) {}

  bool empty() const { return nx_ <= 0 || ny_ <= 0 || nz_ <= 0; }
  const Vec2& origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }

  bool in_bounds(int ix, int iy, int iz) const {
    return ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_ && iz >= 0 && iz < nz_;
  }

  bool occupied(int ix, int iy, int iz) const {
    if (!in_bounds(ix, iy, iz)) return false;
    return cells_[index(ix, iy, iz)] != 0;
  }

  void set_occupied(int ix, int iy, int iz, bool value = true) {
    if (!in_bounds(ix, iy, iz)) return;
    cells_[index(ix, iy, iz)] = value ? 1 : 0;
  }

  // Marks every cell whose center lies in the closed world-space box.
  void fill_box(const Vec3& lo, const Vec3& hi);

  Eigen::Vector3i world_to_index(const Vec3& p) const {
    return Eigen::Vector3i(
        static_cast<int>(std::floor((p.x() - origin_.x()) / cell_size_)),
        static_cast<int>(std::floor((p.y() - origin_.y()) / cell_size_)),
        static_cast<int>(std::floor(p.z() / cell_size_)));
  }

  Vec3 index_to_center(int ix, int iy, int iz) const {
    return Vec3(origin_.x() + (ix + 0.5) * cell_size_,
                origin_.y() + (iy + 0.5) * cell_size_,
                (iz + 0.5) * cell_size_);
  }

  bool occupied_at(const Vec3& p) const {
    if (empty()) return false;
    const Eigen::Vector3i i = world_to_index(p);
    return occupied(i.x(), i.y(), i.z());
  }

  // Top of the highest occupied voxel in the column under (x, y); 0 if none.
  double ground_height(double x, double y) const;

  // True when no occupied voxel lies strictly between a and b (the voxels
  // containing the endpoints themselves are ignored). Amanatides-Woo DDA.
  bool line_of_sight(const Vec3& a, const Vec3& b) const;

  // All cells the open segment (a, b) traverses, endpoint cells excluded.
  std::vector<Eigen::Vector3i> traversed_cells(const Vec3& a,
                                               const Vec3& b) const;

  const std::vector<std::uint8_t>& raw_cells() const { return cells_; }
  std::vector<std::uint8_t>& raw_cells() { return cells_; }

 private:
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(iz) * ny_ + iy) * nx_ + ix;
  }

  Vec2 origin_{0.0, 0.0};
  double cell_size_ = 1.0;
  int nx_ = 0;
  int ny_ = 0;
  int nz_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Packed-bit binary grid file ("NSOG" magic, version byte, little-endian
// layout). See the scenario format notes in the README.
void save_grid_nsog(const OccupancyGrid& grid, const std::string& path);
OccupancyGrid load_grid_nsog(const std::string& path);

}  // namespace neusis
