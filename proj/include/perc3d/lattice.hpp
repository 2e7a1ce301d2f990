#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "perc3d/errors.hpp"
#include "perc3d/rng.hpp"

namespace perc3d {

enum class PercolationKind { bond, site };

inline std::string_view to_string(PercolationKind kind) {
  return kind == PercolationKind::bond ? "bond" : "site";
}

inline PercolationKind parse_kind(std::string_view text) {
  if (text == "bond") return PercolationKind::bond;
  if (text == "site") return PercolationKind::site;
  throw DomainError("unknown percolation kind '" + std::string(text) + "'");
}

using Coord = std::array<int, 3>;

// Axis-aligned vertex grid; vertex index = x + nx * (y + ny * z).
struct BoxShape {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t vertex_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  int extent(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
  bool contains(const Coord& c) const {
    return c[0] >= 0 && c[0] < nx && c[1] >= 0 && c[1] < ny && c[2] >= 0 &&
           c[2] < nz;
  }
  std::size_t index(const Coord& c) const {
    return static_cast<std::size_t>(c[0]) +
           static_cast<std::size_t>(nx) *
               (static_cast<std::size_t>(c[1]) +
                static_cast<std::size_t>(ny) * static_cast<std::size_t>(c[2]));
  }
  Coord coord(std::size_t v) const {
    const auto sx = static_cast<std::size_t>(nx);
    const auto sy = static_cast<std::size_t>(ny);
    return {static_cast<int>(v % sx), static_cast<int>((v / sx) % sy),
            static_cast<int>(v / (sx * sy))};
  }
  // Vertex index stride along an axis.
  std::size_t stride(int axis) const {
    if (axis == 0) return 1;
    if (axis == 1) return static_cast<std::size_t>(nx);
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }

  friend bool operator==(const BoxShape&, const BoxShape&) = default;
};

// Half-open per-axis index range [lo, hi) inside a BoxShape.
struct Window {
  Coord lo{};
  Coord hi{};

  bool contains(const Coord& c) const {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < lo[a] || c[a] >= hi[a]) return false;
    }
    return true;
  }
  std::size_t vertex_count() const {
    std::size_t n = 1;
    for (int a = 0; a < 3; ++a) n *= static_cast<std::size_t>(hi[a] - lo[a]);
    return n;
  }
  static Window whole(const BoxShape& s) { return {{0, 0, 0}, {s.nx, s.ny, s.nz}}; }

  friend bool operator==(const Window&, const Window&) = default;
};

// A cubic block of side L. The centre is the middle (L/2)^3 sub-cube and the
// surface is the outer shell of thickness one.
struct BlockGeometry {
  int L = 0;
  PercolationKind kind = PercolationKind::bond;
  int centre_lo = 0;
  int centre_hi = 0;

  BoxShape shape() const { return {L, L, L}; }
  Window centre() const {
    return {{centre_lo, centre_lo, centre_lo}, {centre_hi, centre_hi, centre_hi}};
  }
  bool in_centre(const Coord& c) const { return centre().contains(c); }
  bool on_surface(const Coord& c) const {
    for (int a = 0; a < 3; ++a) {
      if (c[a] == 0 || c[a] == L - 1) return true;
    }
    return false;
  }
  std::size_t surface_count() const {
    const auto l = static_cast<std::size_t>(L);
    const auto inner = static_cast<std::size_t>(L - 2);
    return l * l * l - inner * inner * inner;
  }
  std::size_t centre_count() const {
    const auto h = static_cast<std::size_t>(L / 2);
    return h * h * h;
  }
};

inline BlockGeometry make_block_geometry(int L, PercolationKind kind) {
  if (L < 8 || L % 4 != 0) {
    throw InvalidGeometry("block side must be >= 8 and divisible by 4, got " +
                          std::to_string(L));
  }
  return {L, kind, L / 4, 3 * L / 4};
}

// Two s^3 cubes stacked along z: half_u is z < s, half_v is z >= s.
struct RectGeometry {
  int s = 0;
  PercolationKind kind = PercolationKind::bond;

  BoxShape shape() const { return {s, s, 2 * s}; }
  Window half_u() const { return {{0, 0, 0}, {s, s, s}}; }
  Window half_v() const { return {{0, 0, s}, {s, s, 2 * s}}; }
};

inline RectGeometry make_rect_geometry(int s, PercolationKind kind) {
  if (s < 2) {
    throw InvalidGeometry("rectangle cube side must be >= 2, got " + std::to_string(s));
  }
  return {s, kind};
}

// Bit-packed open/closed states over a box. Bond kind stores one bit per
// (vertex, axis) slot for the bond from the vertex in the +axis direction;
// slots whose far endpoint leaves the box are never opened and are not
// counted as elements. Site kind stores one bit per vertex.
class OccupancySample {
 public:
  OccupancySample(BoxShape shape, PercolationKind kind, double p, std::uint64_t seed)
      : shape_(shape), kind_(kind), p_(p), seed_(seed),
        bits_((slot_count(shape, kind) + 63) / 64, 0) {}

  static OccupancySample closed(BoxShape shape, PercolationKind kind) {
    return OccupancySample(shape, kind, 0.0, 0);
  }

  const BoxShape& shape() const { return shape_; }
  PercolationKind kind() const { return kind_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  bool has_bond(std::size_t v, int axis) const {
    return shape_.coord(v)[axis] + 1 < shape_.extent(axis);
  }

  bool bond_open(std::size_t v, int axis) const { return test(3 * v + axis); }
  bool site_open(std::size_t v) const {
    return kind_ == PercolationKind::bond || test(v);
  }

  // Whether v and its +axis neighbour are joined by an open edge. The caller
  // guarantees the neighbour exists.
  bool edge_open(std::size_t v, int axis) const {
    if (kind_ == PercolationKind::bond) return test(3 * v + axis);
    return test(v) && test(v + shape_.stride(axis));
  }

  void set_bond(std::size_t v, int axis, bool open) {
    if (kind_ != PercolationKind::bond) throw ContractError("set_bond on a site sample");
    if (!has_bond(v, axis)) throw ContractError("bond leaves the sample region");
    assign(3 * v + axis, open);
  }
  void set_site(std::size_t v, bool open) {
    if (kind_ != PercolationKind::site) throw ContractError("set_site on a bond sample");
    assign(v, open);
  }

  // Open bond between two lattice-adjacent vertices, in either order.
  void open_edge(const Coord& a, const Coord& b) {
    int axis = -1;
    for (int k = 0; k < 3; ++k) {
      if (a[k] != b[k]) axis = k;
    }
    const Coord& lo = a[axis] < b[axis] ? a : b;
    set_bond(shape_.index(lo), axis, true);
  }

  std::size_t element_count() const {
    if (kind_ == PercolationKind::site) return shape_.vertex_count();
    std::size_t n = 0;
    for (int a = 0; a < 3; ++a) {
      std::size_t per = 1;
      for (int b = 0; b < 3; ++b) {
        per *= static_cast<std::size_t>(a == b ? shape_.extent(b) - 1 : shape_.extent(b));
      }
      n += per;
    }
    return n;
  }

  std::size_t open_count() const {
    std::size_t n = 0;
    for (auto w : bits_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // Open state of each stored slot, for element-wise comparison.
  const std::vector<std::uint64_t>& words() const { return bits_; }

  friend bool operator==(const OccupancySample& a, const OccupancySample& b) {
    return a.shape_ == b.shape_ && a.kind_ == b.kind_ && a.bits_ == b.bits_;
  }

 private:
  friend OccupancySample sample_box(const BoxShape&, PercolationKind, double, std::uint64_t);

  static std::size_t slot_count(const BoxShape& s, PercolationKind kind) {
    return (kind == PercolationKind::bond ? 3 : 1) * s.vertex_count();
  }
  bool test(std::size_t i) const { return (bits_[i >> 6] >> (i & 63)) & 1U; }
  void assign(std::size_t i, bool open) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (open) {
      bits_[i >> 6] |= mask;
    } else {
      bits_[i >> 6] &= ~mask;
    }
  }

  BoxShape shape_;
  PercolationKind kind_;
  double p_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> bits_;
};

// Draws one uniform per element in a fixed order (x fastest, then y, then z;
// bonds in axis order x, y, z within each vertex, skipping absent bonds) and
// opens the element iff the uniform is below p. A fixed seed therefore
// couples samples monotonically in p.
inline OccupancySample sample_box(const BoxShape& shape, PercolationKind kind, double p,
                                  std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("open probability must lie in [0, 1]");
  }
  OccupancySample out(shape, kind, p, seed);
  Xoshiro256ss rng(seed);
  std::size_t v = 0;
  for (int z = 0; z < shape.nz; ++z) {
    for (int y = 0; y < shape.ny; ++y) {
      for (int x = 0; x < shape.nx; ++x, ++v) {
        if (kind == PercolationKind::site) {
          if (rng.uniform() < p) out.assign(v, true);
          continue;
        }
        if (x + 1 < shape.nx && rng.uniform() < p) out.assign(3 * v, true);
        if (y + 1 < shape.ny && rng.uniform() < p) out.assign(3 * v + 1, true);
        if (z + 1 < shape.nz && rng.uniform() < p) out.assign(3 * v + 2, true);
      }
    }
  }
  return out;
}

inline OccupancySample sample_block(const BlockGeometry& g, double p, std::uint64_t seed) {
  return sample_box(g.shape(), g.kind, p, seed);
}

inline OccupancySample sample_rect(const RectGeometry& r, double p, std::uint64_t seed) {
  return sample_box(r.shape(), r.kind, p, seed);
}

// Lattice neighbours of v inside the shape, as (neighbour, axis, lower endpoint).
template <typename Fn>
void for_each_lattice_neighbour(const BoxShape& shape, std::size_t v, Fn&& fn) {
  const Coord c = shape.coord(v);
  for (int axis = 0; axis < 3; ++axis) {
    const std::size_t stride = shape.stride(axis);
    if (c[axis] > 0) fn(v - stride, axis, v - stride);
    if (c[axis] + 1 < shape.extent(axis)) fn(v + stride, axis, v);
  }
}

}  // namespace perc3d
