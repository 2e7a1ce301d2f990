#include <gtest/gtest.h>

#include "perc3d.hpp"
#include "test_support.hpp"

using namespace perc3d;
using perc3d::testing::preserves_box;
using perc3d::testing::transformed;

namespace {

OccupancySample straight_line(const BlockGeometry& g, int y, int z) {
  auto s = OccupancySample::closed(g.shape(), g.kind);
  for (int x = 0; x + 1 < g.L; ++x) {
    if (g.kind == PercolationKind::site) {
      s.set_site(g.shape().index({x, y, z}), true);
      s.set_site(g.shape().index({x + 1, y, z}), true);
    } else {
      s.open_edge({x, y, z}, {x + 1, y, z});
    }
  }
  return s;
}

void open_path(OccupancySample& s, const std::vector<Coord>& path) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (s.kind() == PercolationKind::site) {
      s.set_site(s.shape().index(path[i]), true);
      s.set_site(s.shape().index(path[i + 1]), true);
    } else {
      s.open_edge(path[i], path[i + 1]);
    }
  }
}

}  // namespace

class EventKinds : public ::testing::TestWithParam<PercolationKind> {};

TEST_P(EventKinds, AllClosedFailsBoth) {
  const auto g = make_block_geometry(8, GetParam());
  const auto s = OccupancySample::closed(g.shape(), g.kind);
  EXPECT_FALSE(lower_event(s, g).holds);
  EXPECT_FALSE(lower_event_oracle(s, g));
  const auto r = make_rect_geometry(4, GetParam());
  const auto t = OccupancySample::closed(r.shape(), r.kind);
  EXPECT_FALSE(upper_event(t, r).holds);
  EXPECT_FALSE(upper_event_oracle(t, r));
}

TEST_P(EventKinds, AllOpenHoldsBoth) {
  const auto g = make_block_geometry(8, GetParam());
  const auto s = sample_block(g, 1.0, 0);
  const auto res = lower_event(s, g);
  ASSERT_TRUE(res.holds);
  ASSERT_TRUE(res.witness);
  EXPECT_TRUE(verify_lower_witness(s, g, *res.witness));
  EXPECT_TRUE(lower_event_oracle(s, g));
  const auto r = make_rect_geometry(4, GetParam());
  const auto t = sample_rect(r, 1.0, 0);
  const auto up = upper_event(t, r);
  ASSERT_TRUE(up.holds);
  EXPECT_TRUE(verify_upper_witness(t, r, *up.witness));
  EXPECT_EQ(up.witness->size_u, 64u);
  EXPECT_TRUE(upper_event_oracle(t, r));
}

TEST_P(EventKinds, StraightLineThroughCentreHolds) {
  const auto g = make_block_geometry(8, GetParam());
  const auto s = straight_line(g, 3, 4);
  const auto res = lower_event(s, g);
  ASSERT_TRUE(res.holds);
  EXPECT_TRUE(verify_lower_witness(s, g, *res.witness));
  EXPECT_TRUE(lower_event_oracle(s, g));
}

TEST_P(EventKinds, LineMissingTheCentreFails) {
  const auto g = make_block_geometry(8, GetParam());
  const auto s = straight_line(g, 1, 4);
  EXPECT_FALSE(lower_event(s, g).holds);
  EXPECT_FALSE(lower_event_oracle(s, g));
}

TEST_P(EventKinds, DeadEndArmFails) {
  const auto g = make_block_geometry(8, GetParam());
  auto s = OccupancySample::closed(g.shape(), g.kind);
  open_path(s, {{0, 3, 3}, {1, 3, 3}, {2, 3, 3}, {3, 3, 3}, {4, 3, 3}, {4, 4, 3}});
  EXPECT_FALSE(lower_event(s, g).holds);
  EXPECT_FALSE(lower_event_oracle(s, g));
}

TEST_P(EventKinds, SingleSurfaceContactFails) {
  // A loop through the centre that reaches the surface at one vertex only.
  const auto g = make_block_geometry(8, GetParam());
  auto s = OccupancySample::closed(g.shape(), g.kind);
  open_path(s, {{0, 3, 3}, {1, 3, 3}, {2, 3, 3}, {2, 4, 3}, {1, 4, 3}, {1, 3, 3}});
  EXPECT_FALSE(lower_event(s, g).holds);
  EXPECT_FALSE(lower_event_oracle(s, g));
}

TEST_P(EventKinds, TwoArmsToSameFaceHold) {
  const auto g = make_block_geometry(8, GetParam());
  auto s = OccupancySample::closed(g.shape(), g.kind);
  open_path(s, {{0, 2, 3}, {1, 2, 3}, {2, 2, 3}, {2, 3, 3}, {2, 4, 3}, {1, 4, 3}, {0, 4, 3}});
  const auto res = lower_event(s, g);
  ASSERT_TRUE(res.holds);
  EXPECT_TRUE(verify_lower_witness(s, g, *res.witness));
  EXPECT_TRUE(lower_event_oracle(s, g));
}

TEST_P(EventKinds, TamperedWitnessRejected) {
  const auto g = make_block_geometry(8, GetParam());
  const auto s = straight_line(g, 3, 4);
  auto w = *lower_event(s, g).witness;
  auto bad = w;
  bad.arm_b = bad.arm_a;
  EXPECT_FALSE(verify_lower_witness(s, g, bad));
  bad = w;
  bad.arm_a.pop_back();
  EXPECT_FALSE(verify_lower_witness(s, g, bad));
}

TEST_P(EventKinds, LowerMatchesOracle) {
  const auto g = make_block_geometry(8, GetParam());
  for (double p : {0.15, 0.2488, 0.35}) {
    int holds = 0;
    for (std::uint64_t seed = 0; seed < 1500; ++seed) {
      const auto s = sample_block(g, p, seed);
      const auto res = lower_event(s, g);
      ASSERT_EQ(res.holds, lower_event_oracle(s, g)) << "p=" << p << " seed=" << seed;
      if (res.holds) {
        ++holds;
        ASSERT_TRUE(verify_lower_witness(s, g, *res.witness));
      }
    }
    EXPECT_GT(holds, 0);
  }
}

TEST_P(EventKinds, LowerMatchesOracleOnL12) {
  const auto g = make_block_geometry(12, GetParam());
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto s = sample_block(g, GetParam() == PercolationKind::bond ? 0.25 : 0.31, seed);
    ASSERT_EQ(lower_event(s, g).holds, lower_event_oracle(s, g)) << "seed=" << seed;
  }
}

TEST_P(EventKinds, UpperMatchesOracle) {
  const auto r = make_rect_geometry(4, GetParam());
  for (double p : {0.2, 0.35, 0.5, 0.7}) {
    int holds = 0;
    for (std::uint64_t seed = 0; seed < 1500; ++seed) {
      const auto s = sample_rect(r, p, seed);
      const auto res = upper_event(s, r);
      ASSERT_EQ(res.holds, upper_event_oracle(s, r)) << "p=" << p << " seed=" << seed;
      if (res.holds) {
        ++holds;
        ASSERT_TRUE(verify_upper_witness(s, r, *res.witness));
      }
    }
    if (p >= 0.5) {
      EXPECT_GT(holds, 0);
    }
  }
}

TEST_P(EventKinds, LowerMonotoneUnderCoupling) {
  const auto g = make_block_geometry(12, GetParam());
  const double ps[] = {0.15, 0.25, 0.3, 0.4, 0.6, 0.8};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    bool prev = false;
    for (double p : ps) {
      const bool now = lower_event(sample_block(g, p, seed), g).holds;
      ASSERT_TRUE(!prev || now) << "seed=" << seed << " p=" << p;
      prev = now;
    }
  }
}

// Upper flips do occur on small boxes; each one must be a property of the
// event itself, so the oracle has to see the same flip.
TEST_P(EventKinds, UpperFlipsAreGenuine) {
  const auto r = make_rect_geometry(6, GetParam());
  const double ps[] = {0.15, 0.25, 0.3, 0.4, 0.6, 0.8};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (double p : ps) {
      const auto sample = sample_rect(r, p, seed);
      ASSERT_EQ(upper_event(sample, r).holds, upper_event_oracle(sample, r))
          << "seed=" << seed << " p=" << p;
    }
  }
}

TEST(Events, UpperEventIsNotMonotoneInGeneral) {
  // Lower half before: the z=3 layer (16 sites, joined to the open upper
  // half), rows y=0,1 of z=0 (8 sites) and row y=3 of z=0 (4 sites). Opening
  // row y=2 of z=0 makes a second 16-site cluster and breaks uniqueness.
  const auto r = make_rect_geometry(4, PercolationKind::site);
  const auto shape = r.shape();
  auto s = OccupancySample::closed(shape, r.kind);
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    if (shape.coord(v)[2] >= 3) s.set_site(v, true);
  }
  for (int y : {0, 1, 3}) {
    for (int x = 0; x < 4; ++x) s.set_site(shape.index({x, y, 0}), true);
  }
  ASSERT_TRUE(upper_event(s, r).holds);
  ASSERT_TRUE(upper_event_oracle(s, r));
  for (int x = 0; x < 4; ++x) s.set_site(shape.index({x, 2, 0}), true);
  EXPECT_FALSE(upper_event(s, r).holds);
  EXPECT_FALSE(upper_event_oracle(s, r));
}

TEST_P(EventKinds, NecessaryCondition) {
  const auto g = make_block_geometry(8, GetParam());
  const auto shape = g.shape();
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto s = sample_block(g, 0.3, seed);
    if (!lower_event(s, g).holds) continue;
    const auto lab = label_clusters(s);
    bool found = false;
    for (const auto& [label, size] : lab.clusters()) {
      std::size_t surf = 0;
      bool centre = false;
      for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
        if (lab.label(v) != label) continue;
        surf += g.on_surface(shape.coord(v));
        centre = centre || g.in_centre(shape.coord(v));
      }
      found = found || (centre && surf >= 2);
    }
    ASSERT_TRUE(found) << "seed=" << seed;
  }
}

TEST_P(EventKinds, InvariantUnderCubeSymmetries) {
  const auto g = make_block_geometry(8, GetParam());
  const auto r = make_rect_geometry(4, GetParam());
  const auto syms = cube_symmetries();
  int rect_syms = 0;
  for (const auto& sym : syms) rect_syms += preserves_box(r.shape(), sym);
  EXPECT_EQ(rect_syms, 16);
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto s = sample_block(g, 0.3, seed);
    const bool lower = lower_event(s, g).holds;
    const auto t = sample_rect(r, 0.45, seed);
    const bool upper = upper_event(t, r).holds;
    for (const auto& sym : syms) {
      ASSERT_EQ(lower_event(transformed(s, sym), g).holds, lower);
      if (preserves_box(r.shape(), sym)) {
        ASSERT_EQ(upper_event(transformed(t, sym), r).holds, upper);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, EventKinds,
                         ::testing::Values(PercolationKind::bond, PercolationKind::site),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Events, TiedHalvesFailUpper) {
  const auto r = make_rect_geometry(4, PercolationKind::site);
  auto s = OccupancySample::closed(r.shape(), r.kind);
  const auto shape = r.shape();
  // Two equal dimers in the lower half; the upper half is fully open.
  s.set_site(shape.index({0, 0, 0}), true);
  s.set_site(shape.index({1, 0, 0}), true);
  s.set_site(shape.index({3, 3, 0}), true);
  s.set_site(shape.index({3, 2, 0}), true);
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    if (shape.coord(v)[2] >= 4) s.set_site(v, true);
  }
  EXPECT_FALSE(upper_event(s, r).holds);
  EXPECT_FALSE(upper_event_oracle(s, r));
}

TEST(Events, DisconnectedHalvesFailUpper) {
  const auto r = make_rect_geometry(3, PercolationKind::bond);
  auto s = sample_rect(r, 1.0, 0);
  const auto shape = r.shape();
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) s.set_bond(shape.index({x, y, 2}), 2, false);
  }
  EXPECT_FALSE(upper_event(s, r).holds);
  EXPECT_FALSE(upper_event_oracle(s, r));
}

TEST(Events, GeometryMismatchIsContractError) {
  const auto g8 = make_block_geometry(8, PercolationKind::bond);
  const auto g12 = make_block_geometry(12, PercolationKind::bond);
  const auto s = sample_block(g8, 0.3, 1);
  EXPECT_THROW(lower_event(s, g12), ContractError);
  const auto site8 = make_block_geometry(8, PercolationKind::site);
  EXPECT_THROW(lower_event(s, site8), ContractError);
  const auto r = make_rect_geometry(4, PercolationKind::bond);
  EXPECT_THROW(upper_event(s, r), ContractError);
}

TEST(Events, OraclesRefuseLargeInstances) {
  const auto g = make_block_geometry(20, PercolationKind::bond);
  EXPECT_THROW(lower_event_oracle(sample_block(g, 0.3, 1), g), OracleRefusal);
  const auto r = make_rect_geometry(9, PercolationKind::bond);
  EXPECT_THROW(upper_event_oracle(sample_rect(r, 0.3, 1), r), OracleRefusal);
}
