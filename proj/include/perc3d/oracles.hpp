#pragma once

// Brute-force reference implementations of the block events. They are
// deliberately naive and share no code with events.hpp beyond reading the
// sample; they exist to cross-check the detectors on small instances.

#include <cstddef>
#include <cstdint>
#include <map>
#include <queue>
#include <vector>

#include "perc3d/errors.hpp"
#include "perc3d/lattice.hpp"

namespace perc3d {

namespace oracle_detail {

// Open adjacency of a sample as explicit lists.
inline std::vector<std::vector<std::size_t>> open_adjacency(const OccupancySample& sample) {
  const BoxShape& shape = sample.shape();
  std::vector<std::vector<std::size_t>> adj(shape.vertex_count());
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    const Coord c = shape.coord(v);
    for (int axis = 0; axis < 3; ++axis) {
      Coord d = c;
      d[axis] += 1;
      if (!shape.contains(d)) continue;
      const std::size_t w = shape.index(d);
      const bool open = sample.kind() == PercolationKind::bond
                            ? sample.bond_open(v, axis)
                            : (sample.site_open(v) && sample.site_open(w));
      if (open) {
        adj[v].push_back(w);
        adj[w].push_back(v);
      }
    }
  }
  return adj;
}

// Ford-Fulkerson with DFS augmentation on a split graph: vertex x becomes
// 2x (in) -> 2x+1 (out) with capacity 1.
class SplitFlow {
 public:
  explicit SplitFlow(std::size_t nodes) : out_(nodes) {}

  void arc(std::size_t a, std::size_t b, int cap) {
    out_[a].push_back(edges_.size());
    edges_.push_back({b, cap});
    out_[b].push_back(edges_.size());
    edges_.push_back({a, 0});
  }

  int max_flow(std::size_t s, std::size_t t, int limit) {
    int flow = 0;
    while (flow < limit) {
      std::vector<char> seen(out_.size(), 0);
      if (!dfs(s, t, seen)) break;
      ++flow;
    }
    return flow;
  }

 private:
  struct Edge {
    std::size_t to;
    int cap;
  };

  bool dfs(std::size_t u, std::size_t t, std::vector<char>& seen) {
    if (u == t) return true;
    seen[u] = 1;
    for (std::size_t id : out_[u]) {
      Edge& e = edges_[id];
      if (e.cap > 0 && !seen[e.to] && dfs(e.to, t, seen)) {
        e.cap -= 1;
        edges_[id ^ 1].cap += 1;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<std::size_t>> out_;
  std::vector<Edge> edges_;
};

}  // namespace oracle_detail

// For each centre vertex, max-flow with unit vertex capacities from it to a
// super-sink joined to every surface vertex. True iff some flow reaches 2.
inline bool lower_event_oracle(const OccupancySample& sample, const BlockGeometry& g) {
  if (g.L > 16) throw OracleRefusal("lower_event_oracle is limited to L <= 16");
  if (!(sample.shape() == g.shape()) || sample.kind() != g.kind) {
    throw ContractError("sample was not generated on this block geometry");
  }
  const BoxShape& shape = sample.shape();
  const std::size_t n = shape.vertex_count();
  const auto adj = oracle_detail::open_adjacency(sample);
  const std::size_t sink = 2 * n;

  // Vertices joined to the surface at all; the rest cannot have any arm.
  std::vector<char> reach(n, 0);
  std::queue<std::size_t> q;
  for (std::size_t v = 0; v < n; ++v) {
    if (g.on_surface(shape.coord(v)) && sample.site_open(v)) {
      reach[v] = 1;
      q.push(v);
    }
  }
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (std::size_t w : adj[u]) {
      if (!reach[w]) {
        reach[w] = 1;
        q.push(w);
      }
    }
  }

  for (std::size_t v = 0; v < n; ++v) {
    if (!g.in_centre(shape.coord(v)) || !sample.site_open(v) || !reach[v]) continue;
    if (adj[v].size() < 2) continue;
    oracle_detail::SplitFlow net(2 * n + 1);
    for (std::size_t x = 0; x < n; ++x) {
      if (!reach[x]) continue;
      net.arc(2 * x, 2 * x + 1, x == v ? 2 : 1);
      for (std::size_t y : adj[x]) net.arc(2 * x + 1, 2 * y, 1);
      if (g.on_surface(shape.coord(x)) && sample.site_open(x)) net.arc(2 * x + 1, sink, 1);
    }
    if (net.max_flow(2 * v + 1, sink, 2) >= 2) return true;
  }
  return false;
}

// Recomputes the upper event from scratch: BFS components per half, an
// exhaustive size table, then BFS connectivity across the whole rectangle.
inline bool upper_event_oracle(const OccupancySample& sample, const RectGeometry& r) {
  if (r.s > 8) throw OracleRefusal("upper_event_oracle is limited to s <= 8");
  if (!(sample.shape() == r.shape()) || sample.kind() != r.kind) {
    throw ContractError("sample was not generated on this rectangle geometry");
  }
  const BoxShape& shape = sample.shape();
  const std::size_t n = shape.vertex_count();
  const auto adj = oracle_detail::open_adjacency(sample);

  auto components = [&](auto&& inside) {
    std::vector<long> comp(n, -1);
    long next = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (!inside(v) || !sample.site_open(v) || comp[v] >= 0) continue;
      std::queue<std::size_t> q;
      q.push(v);
      comp[v] = next;
      while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop();
        for (std::size_t w : adj[u]) {
          if (inside(w) && comp[w] < 0) {
            comp[w] = next;
            q.push(w);
          }
        }
      }
      ++next;
    }
    return comp;
  };

  // Returns a vertex of the strictly largest component, or n if none/tied.
  auto unique_largest = [&](const std::vector<long>& comp) {
    std::map<long, std::size_t> sizes;
    std::map<long, std::size_t> member;
    for (std::size_t v = 0; v < n; ++v) {
      if (comp[v] < 0) continue;
      ++sizes[comp[v]];
      member.emplace(comp[v], v);
    }
    std::size_t best = 0;
    int holders = 0;
    long which = -1;
    for (const auto& [id, size] : sizes) {
      if (size > best) {
        best = size;
        holders = 1;
        which = id;
      } else if (size == best) {
        ++holders;
      }
    }
    return holders == 1 ? member[which] : n;
  };

  const int s = r.s;
  const auto in_u = [&](std::size_t v) { return shape.coord(v)[2] < s; };
  const auto in_v = [&](std::size_t v) { return shape.coord(v)[2] >= s; };
  const std::size_t a = unique_largest(components(in_u));
  const std::size_t b = unique_largest(components(in_v));
  if (a == n || b == n) return false;
  const auto full = components([](std::size_t) { return true; });
  return full[a] == full[b];
}

}  // namespace perc3d
