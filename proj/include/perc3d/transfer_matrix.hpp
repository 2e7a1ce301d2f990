#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "perc3d/errors.hpp"
#include "perc3d/exact.hpp"
#include "perc3d/upsilon.hpp"

namespace perc3d {

// Which non-consecutive block pairs are forbidden on a counted path.
enum class Exclusion {
  // Neither independence-lattice adjacent nor overlapping: the path blocks are
  // mutually independent and the path is chordless.
  upsilon_or_overlap,
  // Only independence-lattice adjacency (and repetition) is forbidden.
  upsilon_only,
};

// The knobs of the path-counting convention. Defaults are the convention this
// library documents as primary.
struct CountingConvention {
  Exclusion exclusion = Exclusion::upsilon_or_overlap;
  // Whether the first block of the starting pair takes part in the
  // non-adjacency checks (it is always kept distinct).
  bool start_block_checked = true;
  // Number of blocks appended after the starting pair is k + this value.
  int length_shift = 0;
  // Entry (i, j) counts paths starting in type i and ending in type j; when
  // false the matrix is transposed (column = starting type).
  bool row_is_start = true;

  std::string describe() const {
    std::ostringstream out;
    out << "appended_blocks=k" << (length_shift == 0 ? "" : std::to_string(length_shift))
        << " exclusion="
        << (exclusion == Exclusion::upsilon_or_overlap ? "upsilon-adjacent-or-overlapping"
                                                       : "upsilon-adjacent")
        << " start_block_checked=" << (start_block_checked ? "yes" : "no")
        << " orientation=" << (row_is_start ? "row=start,col=end" : "row=end,col=start");
    return out.str();
  }
};

struct TransferMatrix {
  int k = 0;
  CountingConvention convention;
  Matrix3 entries;
};

// Fixed representative neighbour of each pair type, used as the starting pair
// (origin, representative).
inline Offset type_representative(PairType t) {
  switch (t) {
    case PairType::FaceCentre: return {2, 0, 0};
    case PairType::FaceEdge: return {2, 1, 0};
    case PairType::FaceCorner: return {2, 1, 1};
  }
  return {2, 0, 0};
}

namespace detail {

// Depth-first enumeration of chordless paths with an occupancy grid of
// "forbidden" counters, so each extension check is a single lookup.
class PathCounter {
 public:
  PathCounter(int appended, const CountingConvention& conv) : appended_(appended), conv_(conv) {
    const auto hood = upsilon_neighbors();
    steps_ = hood.offsets;
    step_type_.reserve(hood.types.size());
    for (auto t : hood.types) step_type_.push_back(static_cast<int>(t));
    for (int x = -2; x <= 2; ++x) {
      for (int y = -2; y <= 2; ++y) {
        for (int z = -2; z <= 2; ++z) {
          const Offset d{x, y, z};
          const bool same = x == 0 && y == 0 && z == 0;
          const bool forbidden =
              is_upsilon_offset(d) || same ||
              (conv.exclusion == Exclusion::upsilon_or_overlap && overlaps(d));
          if (forbidden) forbidden_.push_back(d);
        }
      }
    }
    radius_ = 2 * (appended + 1) + 3;
    width_ = 2 * radius_ + 1;
    grid_.assign(static_cast<std::size_t>(width_) * width_ * width_, 0);
  }

  // Counts by end type of paths (origin, first, b_2, ...) where b_2 is fixed
  // to `second` (or, when appended == 0, just the pair itself).
  std::array<std::uint64_t, 3> count(const Offset& first, const std::optional<Offset>& second) {
    std::array<std::uint64_t, 3> out{};
    path_[0] = {0, 0, 0};
    path_[1] = first;
    if (appended_ == 0) {
      out[static_cast<int>(pair_type(first))] = 1;
      return out;
    }
    counts_ = &out;
    if (second) {
      // Mirror the check dfs(1) would make for this candidate.
      if (conv_.start_block_checked) mark(path_[0], +1);
      const bool ok = !blocked(*second);
      if (conv_.start_block_checked) mark(path_[0], -1);
      if (!ok) return out;
      if (appended_ == 1) {
        Offset step{(*second)[0] - first[0], (*second)[1] - first[1], (*second)[2] - first[2]};
        ++out[static_cast<int>(pair_type(step))];
        return out;
      }
      path_[2] = *second;
      if (conv_.start_block_checked) mark(path_[0], +1);
      dfs(2);
      if (conv_.start_block_checked) mark(path_[0], -1);
      return out;
    }
    dfs(1);
    return out;
  }

 private:
  std::size_t cell(const Offset& p) const {
    return (static_cast<std::size_t>(p[0] + radius_) * width_ +
            static_cast<std::size_t>(p[1] + radius_)) *
               width_ +
           static_cast<std::size_t>(p[2] + radius_);
  }

  void mark(const Offset& b, int delta) {
    for (const auto& d : forbidden_) {
      grid_[cell({b[0] + d[0], b[1] + d[1], b[2] + d[2]})] += static_cast<std::uint8_t>(delta);
    }
  }

  bool blocked(const Offset& p) const {
    if (grid_[cell(p)] != 0) return true;
    // An unchecked start block must still not be revisited.
    return !conv_.start_block_checked && p[0] == 0 && p[1] == 0 && p[2] == 0;
  }

  // path_[0..t] placed and blocks 0..t-2 marked on entry. Block t-1 is
  // marked here, except an unchecked start block.
  void dfs(int t) {
    const Offset cur = path_[t];
    const bool mark_prev = t >= 2 || conv_.start_block_checked;
    if (mark_prev) mark(path_[t - 1], +1);
    const bool last = t == appended_;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const Offset& d = steps_[i];
      const Offset next{cur[0] + d[0], cur[1] + d[1], cur[2] + d[2]};
      if (blocked(next)) continue;
      if (last) {
        ++(*counts_)[step_type_[i]];
      } else {
        path_[t + 1] = next;
        dfs(t + 1);
      }
    }
    if (mark_prev) mark(path_[t - 1], -1);
  }

  int appended_;
  CountingConvention conv_;
  std::vector<Offset> steps_;
  std::vector<int> step_type_;
  std::vector<Offset> forbidden_;
  int radius_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> grid_;
  std::array<Offset, 16> path_{};
  std::array<std::uint64_t, 3>* counts_ = nullptr;
};

struct CountTask {
  int start_type = 0;
  std::optional<Offset> second;
  std::uint64_t weight = 1;
};

// Work items: one per starting type, or with symmetry reduction one per orbit
// of second-step blocks under the stabiliser of the starting pair.
inline std::vector<CountTask> count_tasks(int appended, bool use_symmetry) {
  std::vector<CountTask> tasks;
  const auto syms = cube_symmetries();
  const auto hood = upsilon_neighbors();
  for (int t = 0; t < 3; ++t) {
    const Offset rep = type_representative(static_cast<PairType>(t));
    if (!use_symmetry || appended < 2) {
      tasks.push_back({t, std::nullopt, 1});
      continue;
    }
    std::vector<CubeSymmetry> stab;
    for (const auto& g : syms) {
      if (g.apply(rep) == rep) stab.push_back(g);
    }
    std::vector<Offset> done;
    for (const auto& d : hood.offsets) {
      const Offset second{rep[0] + d[0], rep[1] + d[1], rep[2] + d[2]};
      if (std::find(done.begin(), done.end(), second) != done.end()) continue;
      std::vector<Offset> orbit;
      for (const auto& g : stab) {
        const Offset image = g.apply(second);
        if (std::find(orbit.begin(), orbit.end(), image) == orbit.end()) orbit.push_back(image);
      }
      done.insert(done.end(), orbit.begin(), orbit.end());
      tasks.push_back({t, second, orbit.size()});
    }
  }
  return tasks;
}

}  // namespace detail

inline int default_worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Counts chordless k-step continuations in the independence lattice from a
// fixed starting pair of each type, classified by the type of the final pair.
// Counts are exact (64-bit accumulation is exact for up to 11 appended
// blocks since 54^11 < 2^64) and independent of the worker schedule.
inline TransferMatrix transfer_matrix(int k, const CountingConvention& conv = {},
                                      bool use_symmetry = true, int workers = 0) {
  if (k < 1) throw DomainError("transfer matrix step count must be >= 1");
  const int appended = k + conv.length_shift;
  if (appended < 0) throw DomainError("convention leaves a negative path length");
  if (appended > 11) throw DomainError("step count too large for exact 64-bit counting");

  const auto tasks = detail::count_tasks(appended, use_symmetry);
  std::vector<std::array<std::uint64_t, 3>> results(tasks.size());
  const int pool = std::max(1, workers > 0 ? workers : default_worker_count());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      detail::PathCounter counter(appended, conv);
      const auto& task = tasks[i];
      auto c = counter.count(type_representative(static_cast<PairType>(task.start_type)),
                             task.second);
      for (auto& x : c) x *= task.weight;
      results[i] = c;
    }
  };
  std::vector<std::thread> threads;
  for (int i = 1; i < pool; ++i) threads.emplace_back(work);
  work();
  for (auto& th : threads) th.join();

  TransferMatrix m;
  m.k = k;
  m.convention = conv;
  for (auto& row : m.entries) row.fill(0);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (int end = 0; end < 3; ++end) {
      const int start = tasks[i].start_type;
      auto& cell = conv.row_is_start ? m.entries[start][end] : m.entries[end][start];
      cell += results[i][end];
    }
  }
  return m;
}

// The 6-step matrix as printed in the literature on this bound; used for
// certification when the enumeration is not reproduced.
inline Matrix3 reference_m6() {
  return {{{BigInt(139068488), BigInt(147798994), BigInt(145131436)},
           {BigInt(708801255), BigInt(754445397), BigInt(740361638)},
           {BigInt(438727951), BigInt(465222047), BigInt(455921413)}}};
}

inline Matrix3 transpose(const Matrix3& m) {
  Matrix3 t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) t[i][j] = m[j][i];
  }
  return t;
}

inline Matrix3 multiply(const Matrix3& a, const Matrix3& b) {
  Matrix3 c;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      c[i][j] = 0;
      for (int l = 0; l < 3; ++l) c[i][j] += a[i][l] * b[l][j];
    }
  }
  return c;
}

// One tried convention and how close it came to the target matrix. The best
// relabelling of the three types (applied to rows and columns alike) is
// reported.
struct ConventionTrial {
  CountingConvention convention;
  Matrix3 computed;
  std::array<int, 3> type_order{0, 1, 2};
  bool matches = false;
  double max_relative_error = 0.0;
};

struct ConventionSearch {
  int k = 0;
  Matrix3 target;
  std::vector<ConventionTrial> trials;

  const ConventionTrial* match() const {
    for (const auto& t : trials) {
      if (t.matches) return &t;
    }
    return nullptr;
  }

  const ConventionTrial& closest() const {
    return *std::min_element(trials.begin(), trials.end(), [](const auto& a, const auto& b) {
      return a.max_relative_error < b.max_relative_error;
    });
  }

  std::string report() const {
    std::ostringstream out;
    out << "convention search for k=" << k << " over " << trials.size() << " conventions\n";
    if (const auto* m = match()) {
      out << "MATCH: " << m->convention.describe() << "\n";
      return out.str();
    }
    out << "DISCREPANCY: no convention in the searched space reproduces the target matrix\n";
    for (const auto& t : trials) {
      out << "  " << t.convention.describe() << "  type_order=" << t.type_order[0]
          << t.type_order[1] << t.type_order[2] << "  max_rel_err=" << t.max_relative_error
          << "\n";
    }
    const auto& best = closest();
    out << "closest: " << best.convention.describe() << "\n";
    for (int i = 0; i < 3; ++i) {
      out << "  ";
      for (int j = 0; j < 3; ++j) {
        const auto& o = best.type_order;
        out << best.computed[o[i]][o[j]] << " (target " << target[i][j] << ")  ";
      }
      out << "\n";
    }
    out << "certification falls back to the target matrix\n";
    return out.str();
  }
};

// Searches exclusion rule x start-block participation x path length
// (k or k-1 appended blocks) x orientation x type relabelling for a
// convention reproducing `target` exactly.
inline ConventionSearch search_conventions(int k, const Matrix3& target, int workers = 0) {
  ConventionSearch search;
  search.k = k;
  search.target = target;
  for (int shift : {0, -1}) {
    for (auto ex : {Exclusion::upsilon_or_overlap, Exclusion::upsilon_only}) {
      for (bool checked : {true, false}) {
        CountingConvention base;
        base.exclusion = ex;
        base.start_block_checked = checked;
        base.length_shift = shift;
        if (k + shift < 0) continue;
        const TransferMatrix m = transfer_matrix(k, base, true, workers);
        for (bool row_start : {true, false}) {
          ConventionTrial trial;
          trial.convention = base;
          trial.convention.row_is_start = row_start;
          trial.computed = row_start ? m.entries : transpose(m.entries);
          trial.max_relative_error = 1e300;
          std::array<int, 3> order{0, 1, 2};
          do {
            double worst = 0.0;
            bool equal = true;
            for (int i = 0; i < 3; ++i) {
              for (int j = 0; j < 3; ++j) {
                const BigInt& got = trial.computed[order[i]][order[j]];
                const BigInt& want = target[i][j];
                if (got != want) equal = false;
                const double w = want.convert_to<double>();
                const double diff = std::abs(got.convert_to<double>() - w);
                worst = std::max(worst, w == 0.0 ? diff : diff / w);
              }
            }
            if (equal || worst < trial.max_relative_error) {
              trial.max_relative_error = worst;
              trial.type_order = order;
              trial.matches = equal;
            }
            if (equal) break;
          } while (std::next_permutation(order.begin(), order.end()));
          search.trials.push_back(trial);
        }
      }
    }
  }
  return search;
}

}  // namespace perc3d
