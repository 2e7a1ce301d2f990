#pragma once

#include <cstddef>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "perc3d/errors.hpp"
#include "perc3d/lattice.hpp"

namespace perc3d {

// Union by size with path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

// Per-vertex cluster labels over a window of a sample, using only edges with
// both endpoints in the window. A label is the smallest vertex index in its
// cluster. Vertices outside the window, and closed sites, carry kNoCluster.
class ClusterLabeling {
 public:
  static constexpr std::uint32_t kNoCluster = std::numeric_limits<std::uint32_t>::max();

  ClusterLabeling(BoxShape shape, Window region, std::vector<std::uint32_t> labels)
      : shape_(shape), region_(region), labels_(std::move(labels)),
        sizes_(labels_.size(), 0) {
    for (auto l : labels_) {
      if (l != kNoCluster) {
        if (sizes_[l]++ == 0) ++cluster_count_;
        ++labeled_count_;
      }
    }
  }

  const BoxShape& shape() const { return shape_; }
  const Window& region() const { return region_; }
  std::uint32_t label(std::size_t v) const { return labels_[v]; }
  std::span<const std::uint32_t> labels() const { return labels_; }
  std::size_t size_of(std::uint32_t label) const { return sizes_[label]; }
  std::size_t cluster_count() const { return cluster_count_; }
  std::size_t labeled_count() const { return labeled_count_; }

  // (label, size) pairs in increasing label order.
  std::vector<std::pair<std::uint32_t, std::size_t>> clusters() const {
    std::vector<std::pair<std::uint32_t, std::size_t>> out;
    out.reserve(cluster_count_);
    for (std::size_t v = 0; v < sizes_.size(); ++v) {
      if (sizes_[v] != 0) out.emplace_back(static_cast<std::uint32_t>(v), sizes_[v]);
    }
    return out;
  }

 private:
  BoxShape shape_;
  Window region_;
  std::vector<std::uint32_t> labels_;
  std::vector<std::uint32_t> sizes_;
  std::size_t cluster_count_ = 0;
  std::size_t labeled_count_ = 0;
};

inline ClusterLabeling label_clusters(const OccupancySample& sample, const Window& region) {
  const BoxShape& shape = sample.shape();
  const std::size_t n = shape.vertex_count();
  if (n >= ClusterLabeling::kNoCluster) {
    throw ContractError("sample too large for 32-bit cluster labels");
  }
  UnionFind uf(n);
  for (int z = region.lo[2]; z < region.hi[2]; ++z) {
    for (int y = region.lo[1]; y < region.hi[1]; ++y) {
      for (int x = region.lo[0]; x < region.hi[0]; ++x) {
        const Coord c{x, y, z};
        const std::size_t v = shape.index(c);
        for (int axis = 0; axis < 3; ++axis) {
          if (c[axis] + 1 >= region.hi[axis]) continue;
          if (sample.edge_open(v, axis)) {
            uf.unite(static_cast<std::uint32_t>(v),
                     static_cast<std::uint32_t>(v + shape.stride(axis)));
          }
        }
      }
    }
  }
  // Vertices are visited in increasing index order, so the first vertex seen
  // for a root is the cluster minimum.
  std::vector<std::uint32_t> labels(n, ClusterLabeling::kNoCluster);
  std::vector<std::uint32_t> canon(n, ClusterLabeling::kNoCluster);
  for (int z = region.lo[2]; z < region.hi[2]; ++z) {
    for (int y = region.lo[1]; y < region.hi[1]; ++y) {
      for (int x = region.lo[0]; x < region.hi[0]; ++x) {
        const std::size_t v = shape.index({x, y, z});
        if (!sample.site_open(v)) continue;
        const std::uint32_t root = uf.find(static_cast<std::uint32_t>(v));
        if (canon[root] == ClusterLabeling::kNoCluster) {
          canon[root] = static_cast<std::uint32_t>(v);
        }
        labels[v] = canon[root];
      }
    }
  }
  return ClusterLabeling(shape, region, std::move(labels));
}

inline ClusterLabeling label_clusters(const OccupancySample& sample) {
  return label_clusters(sample, Window::whole(sample.shape()));
}

struct LargestCluster {
  std::uint32_t label = ClusterLabeling::kNoCluster;
  std::size_t size = 0;
  // Strictly larger than every other cluster meeting the region.
  bool unique = false;
};

// Largest cluster measured by how many region vertices carry its label.
// Ties resolve to unique = false with the smallest label as representative.
// Returns nullopt when no region vertex is labeled.
template <typename Pred>
  requires std::predicate<Pred&, const Coord&>
std::optional<LargestCluster> largest_in_region(const ClusterLabeling& lab, Pred&& in_region) {
  const BoxShape& shape = lab.shape();
  const std::size_t n = shape.vertex_count();
  std::vector<std::uint32_t> count(n, 0);
  std::size_t region_size = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!in_region(shape.coord(v))) continue;
    ++region_size;
    const std::uint32_t l = lab.label(v);
    if (l != ClusterLabeling::kNoCluster) ++count[l];
  }
  if (region_size == 0) throw ContractError("largest_in_region: empty region");

  std::optional<LargestCluster> best;
  std::size_t runner_up = 0;
  for (std::size_t l = 0; l < n; ++l) {
    const std::size_t c = count[l];
    if (c == 0) continue;
    if (!best || c > best->size) {
      if (best) runner_up = best->size;
      best = LargestCluster{static_cast<std::uint32_t>(l), c, false};
    } else if (c > runner_up) {
      runner_up = c;
    }
  }
  if (best) best->unique = best->size > runner_up;
  return best;
}

inline std::optional<LargestCluster> largest_in_region(const ClusterLabeling& lab,
                                                       const Window& region) {
  return largest_in_region(lab, [&region](const Coord& c) { return region.contains(c); });
}

}  // namespace perc3d
