#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "perc3d/errors.hpp"

namespace perc3d {

using Offset = std::array<int, 3>;

// How an independence-lattice neighbour touches the 3x3x3 cube C around a
// block: its centre cell shares a face with the centre, an edge cell or a
// corner cell of one face of C.
enum class PairType : int { FaceCentre = 0, FaceEdge = 1, FaceCorner = 2 };

inline constexpr std::array<PairType, 3> kPairTypes = {
    PairType::FaceCentre, PairType::FaceEdge, PairType::FaceCorner};

inline std::string_view to_string(PairType t) {
  switch (t) {
    case PairType::FaceCentre: return "face-centre";
    case PairType::FaceEdge: return "face-edge";
    case PairType::FaceCorner: return "face-corner";
  }
  return "?";
}

inline int chebyshev(const Offset& d) {
  return std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])});
}

// Exactly one coordinate is +-2 and the others lie in {-1, 0, 1}: a unit
// step out of C.
inline bool is_upsilon_offset(const Offset& d) {
  int twos = 0;
  for (int c : d) {
    const int a = std::abs(c);
    if (a > 2) return false;
    if (a == 2) ++twos;
  }
  return twos == 1;
}

// Blocks overlap iff their unit centres share a face, edge or corner.
inline bool overlaps(const Offset& d) { return chebyshev(d) <= 1; }

inline PairType pair_type(const Offset& d) {
  if (!is_upsilon_offset(d)) {
    throw DomainError("offset (" + std::to_string(d[0]) + "," + std::to_string(d[1]) + "," +
                      std::to_string(d[2]) + ") is not an independence-lattice neighbour");
  }
  int ones = 0;
  for (int c : d) ones += std::abs(c) == 1 ? 1 : 0;
  return static_cast<PairType>(ones);
}

struct UpsilonNeighborhood {
  std::vector<Offset> offsets;
  std::vector<PairType> types;  // parallel to offsets

  std::array<int, 3> multiplicities() const {
    std::array<int, 3> m{};
    for (auto t : types) ++m[static_cast<int>(t)];
    return m;
  }
};

// The 54 neighbours in lexicographic order.
inline UpsilonNeighborhood upsilon_neighbors() {
  UpsilonNeighborhood n;
  for (int x = -2; x <= 2; ++x) {
    for (int y = -2; y <= 2; ++y) {
      for (int z = -2; z <= 2; ++z) {
        const Offset d{x, y, z};
        if (!is_upsilon_offset(d)) continue;
        n.offsets.push_back(d);
        n.types.push_back(pair_type(d));
      }
    }
  }
  return n;
}

// Signed permutation matrix acting on offsets: result[i] = sign[i] * d[perm[i]].
struct CubeSymmetry {
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> sign{1, 1, 1};

  Offset apply(const Offset& d) const {
    return {sign[0] * d[perm[0]], sign[1] * d[perm[1]], sign[2] * d[perm[2]]};
  }
};

// All 48 isometries of the cube fixing the origin.
inline std::vector<CubeSymmetry> cube_symmetries() {
  std::vector<CubeSymmetry> out;
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int mask = 0; mask < 8; ++mask) {
      CubeSymmetry g;
      g.perm = perm;
      for (int i = 0; i < 3; ++i) g.sign[i] = (mask >> i) & 1 ? -1 : 1;
      out.push_back(g);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

enum class AdjacencyMode { corner_adjacent, face_adjacent };

// Degree of a block in the d-dimensional independence lattice: 5^d - 3^d when
// blocks whose centres share any face, edge or corner are adjacent, and
// 2d * 3^(d-1) when only face-sharing centres are adjacent.
inline std::uint64_t upsilon_degree(int d, AdjacencyMode mode) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (d > 27) throw DomainError("dimension too large for 64-bit degree");
  std::uint64_t p3 = 1;
  std::uint64_t p5 = 1;
  for (int i = 0; i < d; ++i) {
    p3 *= 3;
    p5 *= 5;
  }
  if (mode == AdjacencyMode::corner_adjacent) return p5 - p3;
  return 2 * static_cast<std::uint64_t>(d) * (p3 / 3);
}

}  // namespace perc3d
