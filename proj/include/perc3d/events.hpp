#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "perc3d/clusters.hpp"
#include "perc3d/errors.hpp"
#include "perc3d/lattice.hpp"

namespace perc3d {

template <typename Witness>
struct EventResult {
  bool holds = false;
  std::optional<Witness> witness;
};

// Centre vertex and two open arms from it to distinct surface vertices. Each
// arm starts at the centre vertex and ends on the surface; the arms share only
// their first vertex.
struct LowerWitness {
  std::size_t centre = 0;
  std::vector<std::size_t> arm_a;
  std::vector<std::size_t> arm_b;
};

// Canonical labels of the unique largest clusters of each half, and the label
// of the cluster of the whole rectangle that contains both.
struct UpperWitness {
  std::uint32_t label_u = 0;
  std::uint32_t label_v = 0;
  std::size_t size_u = 0;
  std::size_t size_v = 0;
  std::uint32_t joined_label = 0;
};

namespace detail {

inline void require_block_sample(const OccupancySample& sample, const BlockGeometry& g) {
  if (!(sample.shape() == g.shape()) || sample.kind() != g.kind) {
    throw ContractError("sample was not generated on this block geometry");
  }
}

inline void require_rect_sample(const OccupancySample& sample, const RectGeometry& r) {
  if (!(sample.shape() == r.shape()) || sample.kind() != r.kind) {
    throw ContractError("sample was not generated on this rectangle geometry");
  }
}

// Open subgraph of a block plus a super-node T joined to every open surface
// vertex. Node T has index vertex_count().
class BlockGraph {
 public:
  BlockGraph(const OccupancySample& sample, const BlockGeometry& g)
      : sample_(sample), shape_(sample.shape()), terminal_(shape_.vertex_count()) {
    on_surface_.assign(shape_.vertex_count(), 0);
    for (std::size_t v = 0; v < shape_.vertex_count(); ++v) {
      if (g.on_surface(shape_.coord(v)) && sample.site_open(v)) {
        on_surface_[v] = 1;
        surface_.push_back(v);
      }
    }
  }

  std::size_t terminal() const { return terminal_; }
  std::size_t node_count() const { return terminal_ + 1; }
  bool on_surface(std::size_t v) const { return on_surface_[v] != 0; }

  // Number of neighbour slots of a node; some slots may be empty.
  std::size_t slot_count(std::size_t x) const {
    return x == terminal_ ? surface_.size() : 7;
  }

  // Neighbour in a slot, or npos. Vertex slots 0..5 are -x,+x,-y,+y,-z,+z and
  // slot 6 is T.
  std::size_t neighbour(std::size_t x, std::size_t slot) const {
    if (x == terminal_) return surface_[slot];
    if (slot == 6) return on_surface_[x] ? terminal_ : npos;
    const int axis = static_cast<int>(slot / 2);
    const bool up = (slot % 2) == 1;
    const int c = coord_along(x, axis);
    const std::size_t stride = shape_.stride(axis);
    if (up) {
      if (c + 1 >= shape_.extent(axis)) return npos;
      return sample_.edge_open(x, axis) ? x + stride : npos;
    }
    if (c == 0) return npos;
    return sample_.edge_open(x - stride, axis) ? x - stride : npos;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  int coord_along(std::size_t v, int axis) const {
    return static_cast<int>((v / shape_.stride(axis)) %
                            static_cast<std::size_t>(shape_.extent(axis)));
  }

  const OccupancySample& sample_;
  BoxShape shape_;
  std::size_t terminal_;
  std::vector<std::uint8_t> on_surface_;
  std::vector<std::size_t> surface_;
};

// Marks every vertex that lies in a biconnected component together with T.
// One iterative DFS rooted at T computes low-points; a second pass in
// preorder propagates membership down tree edges that do not start a new
// component.
inline std::vector<std::uint8_t> biconnected_with_terminal(const BlockGraph& graph) {
  const std::size_t n = graph.node_count();
  const std::size_t t = graph.terminal();
  constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> disc(n, kUnseen);
  std::vector<std::uint32_t> low(n, 0);
  std::vector<std::size_t> parent(n, BlockGraph::npos);
  std::vector<std::size_t> next_slot(n, 0);
  std::vector<std::size_t> preorder;
  std::vector<std::size_t> stack;

  std::uint32_t clock = 0;
  disc[t] = low[t] = clock++;
  preorder.push_back(t);
  stack.push_back(t);
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    if (next_slot[u] < graph.slot_count(u)) {
      const std::size_t w = graph.neighbour(u, next_slot[u]++);
      if (w == BlockGraph::npos) continue;
      if (disc[w] == kUnseen) {
        parent[w] = u;
        disc[w] = low[w] = clock++;
        preorder.push_back(w);
        stack.push_back(w);
      } else if (w != parent[u]) {
        low[u] = std::min(low[u], disc[w]);
      }
      continue;
    }
    stack.pop_back();
    if (parent[u] != BlockGraph::npos) {
      low[parent[u]] = std::min(low[parent[u]], low[u]);
    }
  }

  std::vector<std::uint8_t> with_t(n, 0);
  for (std::size_t i = 1; i < preorder.size(); ++i) {
    const std::size_t w = preorder[i];
    const std::size_t p = parent[w];
    with_t[w] = low[w] >= disc[p] ? static_cast<std::uint8_t>(p == t) : with_t[p];
  }
  return with_t;
}

// Unit vertex-capacity flow from a source vertex to T, used only to extract
// the two arms once the event is known to hold.
class ArmFinder {
 public:
  explicit ArmFinder(const BlockGraph& graph) : graph_(graph) {}

  std::optional<LowerWitness> find(std::size_t source) {
    build(source);
    for (int unit = 0; unit < 2; ++unit) {
      if (!augment()) return std::nullopt;
    }
    LowerWitness w;
    w.centre = source;
    std::vector<std::vector<std::size_t>> arms;
    for (std::size_t a = head_[out_node(src_)]; a != kNone; a = arcs_[a].next) {
      if (arcs_[a].cap != 0 || arcs_[a].original == 0) continue;
      std::vector<std::size_t> arm{source};
      std::size_t node = arcs_[a].to;  // in-node of the first arm vertex
      while (true) {
        const std::size_t vid = node / 2;
        if (vid == sink_) break;
        arm.push_back(vertices_[vid]);
        node = follow(out_node(vid));
      }
      arms.push_back(std::move(arm));
    }
    if (arms.size() != 2) return std::nullopt;
    w.arm_a = std::move(arms[0]);
    w.arm_b = std::move(arms[1]);
    return w;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  struct Arc {
    std::size_t to;
    std::size_t next;
    int cap;
    int original;
  };

  static std::size_t in_node(std::size_t id) { return 2 * id; }
  static std::size_t out_node(std::size_t id) { return 2 * id + 1; }

  void add_arc(std::size_t from, std::size_t to, int cap) {
    arcs_.push_back({to, head_[from], cap, cap});
    head_[from] = arcs_.size() - 1;
    arcs_.push_back({from, head_[to], 0, 0});
    head_[to] = arcs_.size() - 1;
  }

  // Compact ids over the connected component of T.
  void build(std::size_t source) {
    const std::size_t t = graph_.terminal();
    std::vector<std::size_t> id(graph_.node_count(), kNone);
    vertices_.clear();
    std::deque<std::size_t> queue{t};
    id[t] = 0;
    vertices_.push_back(t);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t s = 0; s < graph_.slot_count(u); ++s) {
        const std::size_t w = graph_.neighbour(u, s);
        if (w == BlockGraph::npos || id[w] != kNone) continue;
        id[w] = vertices_.size();
        vertices_.push_back(w);
        queue.push_back(w);
      }
    }
    sink_ = 0;
    src_ = id[source];
    head_.assign(2 * vertices_.size(), kNone);
    arcs_.clear();
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      add_arc(in_node(i), out_node(i), (i == sink_ || i == src_) ? 2 : 1);
      const std::size_t u = vertices_[i];
      for (std::size_t s = 0; s < graph_.slot_count(u); ++s) {
        const std::size_t w = graph_.neighbour(u, s);
        if (w == BlockGraph::npos) continue;
        add_arc(out_node(i), in_node(id[w]), 1);
      }
    }
  }

  bool augment() {
    std::vector<std::size_t> via(head_.size(), kNone);
    std::deque<std::size_t> queue{out_node(src_)};
    std::vector<std::uint8_t> seen(head_.size(), 0);
    seen[out_node(src_)] = 1;
    while (!queue.empty() && !seen[in_node(sink_)]) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t a = head_[u]; a != kNone; a = arcs_[a].next) {
        if (arcs_[a].cap == 0 || seen[arcs_[a].to]) continue;
        seen[arcs_[a].to] = 1;
        via[arcs_[a].to] = a;
        queue.push_back(arcs_[a].to);
      }
    }
    if (!seen[in_node(sink_)]) return false;
    for (std::size_t node = in_node(sink_); node != out_node(src_);) {
      const std::size_t a = via[node];
      arcs_[a].cap -= 1;
      arcs_[a ^ 1].cap += 1;
      node = arcs_[a ^ 1].to;
    }
    return true;
  }

  // Saturated forward arc leaving an out-node.
  std::size_t follow(std::size_t out) const {
    for (std::size_t a = head_[out]; a != kNone; a = arcs_[a].next) {
      if (arcs_[a].original == 1 && arcs_[a].cap == 0) return arcs_[a].to;
    }
    throw ContractError("broken flow decomposition");
  }

  const BlockGraph& graph_;
  std::vector<std::size_t> vertices_;
  std::vector<std::size_t> head_;
  std::vector<Arc> arcs_;
  std::size_t src_ = 0;
  std::size_t sink_ = 0;
};

}  // namespace detail

// Event E_B: some centre vertex has two open arms to distinct surface
// vertices that meet only at the centre vertex. Equivalent (Menger) to some
// centre vertex sharing a biconnected component with a super-node attached to
// the whole surface.
inline EventResult<LowerWitness> lower_event(const OccupancySample& sample,
                                             const BlockGeometry& g) {
  detail::require_block_sample(sample, g);
  const detail::BlockGraph graph(sample, g);
  const auto with_t = detail::biconnected_with_terminal(graph);
  const BoxShape shape = g.shape();
  const Window centre = g.centre();
  for (int z = centre.lo[2]; z < centre.hi[2]; ++z) {
    for (int y = centre.lo[1]; y < centre.hi[1]; ++y) {
      for (int x = centre.lo[0]; x < centre.hi[0]; ++x) {
        const std::size_t v = shape.index({x, y, z});
        if (!with_t[v]) continue;
        detail::ArmFinder finder(graph);
        auto witness = finder.find(v);
        if (!witness) throw ContractError("biconnectivity and flow disagree");
        return {true, std::move(witness)};
      }
    }
  }
  return {false, std::nullopt};
}

// Walks the witness: both arms are open paths from an (open) centre vertex to
// distinct surface vertices and share no vertex other than the first.
inline bool verify_lower_witness(const OccupancySample& sample, const BlockGeometry& g,
                                 const LowerWitness& w) {
  const BoxShape shape = g.shape();
  if (w.centre >= shape.vertex_count()) return false;
  if (!g.in_centre(shape.coord(w.centre)) || !sample.site_open(w.centre)) return false;
  std::vector<std::uint8_t> used(shape.vertex_count(), 0);
  for (const auto* arm : {&w.arm_a, &w.arm_b}) {
    if (arm->size() < 2 || arm->front() != w.centre) return false;
    if (!g.on_surface(shape.coord(arm->back()))) return false;
    for (std::size_t i = 1; i < arm->size(); ++i) {
      const std::size_t a = (*arm)[i - 1];
      const std::size_t b = (*arm)[i];
      if (b >= shape.vertex_count() || used[b]) return false;
      used[b] = 1;
      const std::size_t lo = std::min(a, b);
      const std::size_t diff = std::max(a, b) - lo;
      int axis = -1;
      for (int k = 0; k < 3; ++k) {
        if (diff == shape.stride(k)) axis = k;
      }
      if (axis < 0 || !sample.has_bond(lo, axis)) return false;
      if (shape.coord(lo)[axis] + 1 != shape.coord(std::max(a, b))[axis]) return false;
      if (!sample.edge_open(lo, axis)) return false;
    }
  }
  return w.arm_a.back() != w.arm_b.back();
}

// Event E_uv: both halves have a strictly unique largest cluster (using only
// edges inside the half) and those clusters are joined within the rectangle.
inline EventResult<UpperWitness> upper_event(const OccupancySample& sample,
                                             const RectGeometry& r) {
  detail::require_rect_sample(sample, r);
  const Window wu = r.half_u();
  const Window wv = r.half_v();
  const ClusterLabeling lab_u = label_clusters(sample, wu);
  const auto big_u = largest_in_region(lab_u, wu);
  if (!big_u || !big_u->unique) return {false, std::nullopt};
  const ClusterLabeling lab_v = label_clusters(sample, wv);
  const auto big_v = largest_in_region(lab_v, wv);
  if (!big_v || !big_v->unique) return {false, std::nullopt};
  const ClusterLabeling full = label_clusters(sample);
  const std::uint32_t joined = full.label(big_u->label);
  if (joined != full.label(big_v->label)) return {false, std::nullopt};
  return {true, UpperWitness{big_u->label, big_v->label, big_u->size, big_v->size, joined}};
}

// Re-derives the witness labels from the sample and checks them.
inline bool verify_upper_witness(const OccupancySample& sample, const RectGeometry& r,
                                 const UpperWitness& w) {
  const auto check_half = [&](const Window& half, std::uint32_t label, std::size_t size) {
    const ClusterLabeling lab = label_clusters(sample, half);
    if (label >= lab.labels().size() || lab.label(label) != label) return false;
    if (lab.size_of(label) != size) return false;
    for (const auto& [other, other_size] : lab.clusters()) {
      if (other != label && other_size >= size) return false;
    }
    return true;
  };
  if (!check_half(r.half_u(), w.label_u, w.size_u)) return false;
  if (!check_half(r.half_v(), w.label_v, w.size_v)) return false;
  const ClusterLabeling full = label_clusters(sample);
  return full.label(w.label_u) == w.joined_label && full.label(w.label_v) == w.joined_label;
}

}  // namespace perc3d
