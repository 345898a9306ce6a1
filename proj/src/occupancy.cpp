#include "neusis/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace neusis {

void OccupancyGrid::fill_box(const Vec3& lo, const Vec3& hi) {
  if (empty()) return;
  for (int iz = 0; iz < nz_; ++iz) {
    for (int iy = 0; iy < ny_; ++iy) {
      for (int ix = 0; ix < nx_; ++ix) {
        const Vec3 c = index_to_center(ix, iy, iz);
        if (c.x() >= lo.x() && c.x() <= hi.x() && c.y() >= lo.y() &&
            c.y() <= hi.y() && c.z() >= lo.z() && c.z() <= hi.z()) {
          set_occupied(ix, iy, iz);
        }
      }
    }
  }
}

double OccupancyGrid::ground_height(double x, double y) const {
  if (empty()) return 0.0;
  const int ix = static_cast<int>(std::floor((x - origin_.x()) / cell_size_));
  const int iy = static_cast<int>(std::floor((y - origin_.y()) / cell_size_));
  if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return 0.0;
  for (int iz = nz_ - 1; iz >= 0; --iz) {
    if (occupied(ix, iy, iz)) return (iz + 1) * cell_size_;
  }
  return 0.0;
}

std::vector<Eigen::Vector3i> OccupancyGrid::traversed_cells(
    const Vec3& a, const Vec3& b) const {
  std::vector<Eigen::Vector3i> out;
  if (empty()) return out;
  const Vec3 d = b - a;
  const double len = d.norm();
  if (len < 1e-12) return out;

  Eigen::Vector3i cell = world_to_index(a);
  const Eigen::Vector3i end_cell = world_to_index(b);
  const Eigen::Vector3i start_cell = cell;

  Eigen::Vector3i step;
  Vec3 t_max, t_delta;
  const Vec3 grid_origin(origin_.x(), origin_.y(), 0.0);
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] > 0.0) {
      step[axis] = 1;
      const double boundary = grid_origin[axis] + (cell[axis] + 1) * cell_size_;
      t_max[axis] = (boundary - a[axis]) / d[axis];
      t_delta[axis] = cell_size_ / d[axis];
    } else if (d[axis] < 0.0) {
      step[axis] = -1;
      const double boundary = grid_origin[axis] + cell[axis] * cell_size_;
      t_max[axis] = (boundary - a[axis]) / d[axis];
      t_delta[axis] = -cell_size_ / d[axis];
    } else {
      step[axis] = 0;
      t_max[axis] = std::numeric_limits<double>::infinity();
      t_delta[axis] = std::numeric_limits<double>::infinity();
    }
  }

  // Walk cell boundaries until we pass t = 1.
  for (int guard = 0; guard < 4 * (nx_ + ny_ + nz_ + 4); ++guard) {
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (t_max[axis] > 1.0) break;
    cell[axis] += step[axis];
    t_max[axis] += t_delta[axis];
    if (cell == end_cell) break;
    if (cell != start_cell) out.push_back(cell);
  }
  return out;
}

bool OccupancyGrid::line_of_sight(const Vec3& a, const Vec3& b) const {
  if (empty()) return true;
  for (const auto& cell : traversed_cells(a, b)) {
    if (occupied(cell.x(), cell.y(), cell.z())) return false;
  }
  return true;
}

namespace {
constexpr char kMagic[4] = {'N', 'S', 'O', 'G'};
constexpr std::uint8_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char buf[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char buf[4];
  is.read(reinterpret_cast<char*>(buf), 4);
  return static_cast<std::uint32_t>(buf[0]) |
         (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) |
         (static_cast<std::uint32_t>(buf[3]) << 24);
}

void write_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

double read_f64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}
}  // namespace

void save_grid_nsog(const OccupancyGrid& grid, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open grid file for writing: " + path);
  os.write(kMagic, 4);
  os.put(static_cast<char>(kVersion));
  write_f64(os, grid.origin().x());
  write_f64(os, grid.origin().y());
  write_f64(os, grid.cell_size());
  write_u32(os, static_cast<std::uint32_t>(grid.nx()));
  write_u32(os, static_cast<std::uint32_t>(grid.ny()));
  write_u32(os, static_cast<std::uint32_t>(grid.nz()));
  const auto& cells = grid.raw_cells();
  std::vector<std::uint8_t> packed((cells.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  os.write(reinterpret_cast<const char*>(packed.data()),
           static_cast<std::streamsize>(packed.size()));
  if (!os) throw std::runtime_error("failed writing grid file: " + path);
}

OccupancyGrid load_grid_nsog(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open grid file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("bad grid magic in " + path);
  }
  const int version = is.get();
  if (version != kVersion) {
    throw std::runtime_error("unsupported grid version in " + path);
  }
  const double ox = read_f64(is);
  const double oy = read_f64(is);
  const double cs = read_f64(is);
  const int nx = static_cast<int>(read_u32(is));
  const int ny = static_cast<int>(read_u32(is));
  const int nz = static_cast<int>(read_u32(is));
  if (!is || cs <= 0.0 || nx < 0 || ny < 0 || nz < 0) {
    throw std::runtime_error("bad grid header in " + path);
  }
  OccupancyGrid grid(Vec2(ox, oy), cs, nx, ny, nz);
  const std::size_t count = grid.raw_cells().size();
  std::vector<std::uint8_t> packed((count + 7) / 8, 0);
  is.read(reinterpret_cast<char*>(packed.data()),
          static_cast<std::streamsize>(packed.size()));
  if (!is) throw std::runtime_error("truncated grid file: " + path);
  for (std::size_t i = 0; i < count; ++i) {
    grid.raw_cells()[i] = (packed[i / 8] >> (i % 8)) & 1u;
  }
  return grid;
}

}  // namespace neusis
