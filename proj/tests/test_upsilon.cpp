#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "perc3d.hpp"

using namespace perc3d;

namespace {

// Geometric oracle: unit-step neighbours of the 3x3x3 cube C around the origin
// that lie outside C.
std::set<Offset> cube_boundary_neighbours() {
  std::set<Offset> out;
  for (int x = -1; x <= 1; ++x) {
    for (int y = -1; y <= 1; ++y) {
      for (int z = -1; z <= 1; ++z) {
        for (int axis = 0; axis < 3; ++axis) {
          for (int step : {-1, 1}) {
            Offset o{x, y, z};
            o[axis] += step;
            if (chebyshev(o) == 2) out.insert(o);
          }
        }
      }
    }
  }
  return out;
}

// Which feature of a face of C the neighbour's touching block sits on.
PairType face_feature(const Offset& o) {
  int ones = 0;
  for (int c : o) ones += std::abs(c) == 1;
  return ones == 0 ? PairType::FaceCentre : ones == 1 ? PairType::FaceEdge : PairType::FaceCorner;
}

}  // namespace

TEST(Upsilon, FiftyFourNeighbours) {
  const auto nb = upsilon_neighbors();
  EXPECT_EQ(nb.offsets.size(), 54u);
  const std::set<Offset> got(nb.offsets.begin(), nb.offsets.end());
  EXPECT_EQ(got, cube_boundary_neighbours());
}

TEST(Upsilon, TypeMultiplicities) {
  const auto m = upsilon_neighbors().multiplicities();
  EXPECT_EQ(m[0], 6);
  EXPECT_EQ(m[1], 24);
  EXPECT_EQ(m[2], 24);
  EXPECT_EQ(m[0] + m[1] + m[2], 54);
}

TEST(Upsilon, ClassificationMatchesOracle) {
  const auto nb = upsilon_neighbors();
  for (std::size_t i = 0; i < nb.offsets.size(); ++i) {
    EXPECT_EQ(nb.types[i], face_feature(nb.offsets[i]));
    EXPECT_EQ(pair_type(nb.offsets[i]), nb.types[i]);
  }
  EXPECT_EQ(pair_type({2, 0, 0}), PairType::FaceCentre);
  EXPECT_EQ(pair_type({0, -2, 0}), PairType::FaceCentre);
  EXPECT_EQ(pair_type({1, 2, 0}), PairType::FaceEdge);
  EXPECT_EQ(pair_type({-1, 1, -2}), PairType::FaceCorner);
}

TEST(Upsilon, NonNeighboursRejected) {
  EXPECT_THROW(pair_type({0, 0, 0}), DomainError);
  EXPECT_THROW(pair_type({1, 0, 0}), DomainError);
  EXPECT_THROW(pair_type({2, 2, 0}), DomainError);
  EXPECT_THROW(pair_type({3, 0, 0}), DomainError);
  EXPECT_FALSE(is_upsilon_offset({1, 1, 1}));
  EXPECT_TRUE(overlaps({1, 1, 1}));
  EXPECT_FALSE(overlaps({2, 0, 0}));
}

TEST(Upsilon, ClosedUnderNegationAndSymmetry) {
  const auto nb = upsilon_neighbors();
  const std::set<Offset> all(nb.offsets.begin(), nb.offsets.end());
  const auto syms = cube_symmetries();
  EXPECT_EQ(syms.size(), 48u);
  std::set<std::pair<std::array<int, 3>, std::array<int, 3>>> distinct;
  for (const auto& g : syms) distinct.insert({g.perm, g.sign});
  EXPECT_EQ(distinct.size(), 48u);
  for (std::size_t i = 0; i < nb.offsets.size(); ++i) {
    const Offset& o = nb.offsets[i];
    EXPECT_TRUE(all.count({-o[0], -o[1], -o[2]}));
    for (const auto& g : syms) {
      const Offset img = g.apply(o);
      ASSERT_TRUE(all.count(img));
      ASSERT_EQ(pair_type(img), nb.types[i]);
    }
  }
}

TEST(Upsilon, Degrees) {
  EXPECT_EQ(upsilon_degree(3, AdjacencyMode::face_adjacent), 54u);
  EXPECT_EQ(upsilon_degree(4, AdjacencyMode::face_adjacent), 216u);
  EXPECT_EQ(upsilon_degree(5, AdjacencyMode::face_adjacent), 810u);
  EXPECT_EQ(upsilon_degree(3, AdjacencyMode::corner_adjacent), 98u);
  EXPECT_EQ(upsilon_degree(1, AdjacencyMode::corner_adjacent), 2u);
  EXPECT_EQ(upsilon_degree(1, AdjacencyMode::face_adjacent), 2u);
  EXPECT_THROW(upsilon_degree(0, AdjacencyMode::face_adjacent), DomainError);
}

TEST(Upsilon, CornerAdjacentDegreeMatchesEnumeration) {
  // Blocks at Chebyshev distance 2 in d=3 are exactly the 5^3 - 3^3 offsets.
  int count = 0;
  for (int x = -2; x <= 2; ++x) {
    for (int y = -2; y <= 2; ++y) {
      for (int z = -2; z <= 2; ++z) count += chebyshev({x, y, z}) == 2;
    }
  }
  EXPECT_EQ(static_cast<std::uint64_t>(count), upsilon_degree(3, AdjacencyMode::corner_adjacent));
}
