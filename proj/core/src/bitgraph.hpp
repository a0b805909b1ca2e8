// Internal bitmask adjacency helpers shared by the graph routines and the
// sampler hot paths.  Limited to 64 nodes; callers dispatch to the general
// implementations above that size.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>

#include "gwsv/graph.hpp"

namespace gwsv::bitgraph {

constexpr int kMaskNodes = 64;

inline std::uint64_t bit(int i) { return std::uint64_t{1} << i; }

inline std::uint64_t above(int i) {
  return i + 1 >= kMaskNodes ? 0 : ~std::uint64_t{0} << (i + 1);
}

// symbolic elimination in place; returns the number of added edges
inline int eliminate(std::uint64_t* adj, int p) {
  int added = 0;
  for (int v = 0; v < p; ++v) {
    const std::uint64_t higher = adj[v] & above(v);
    for (std::uint64_t m = higher; m;) {
      const int a = std::countr_zero(m);
      m &= m - 1;
      const std::uint64_t fresh = higher & ~adj[a] & ~bit(a);
      added += std::popcount(fresh & above(a));
      adj[a] |= fresh;
    }
  }
  return added;
}

// greedy minimum-fill positions, ties to the lowest node index
inline void greedy_min_fill(const std::uint64_t* adj_in, int p, int* pos) {
  std::uint64_t adj[kMaskNodes];
  std::copy(adj_in, adj_in + p, adj);
  std::uint64_t active = p == kMaskNodes ? ~std::uint64_t{0} : bit(p) - 1;
  for (int step = 0; step < p; ++step) {
    int pick = -1, pick_fill = 0;
    for (std::uint64_t m = active; m;) {
      const int v = std::countr_zero(m);
      m &= m - 1;
      const std::uint64_t nb = adj[v] & active & ~bit(v);
      const int k = std::popcount(nb);
      int present = 0;
      for (std::uint64_t w = nb; w;) {
        const int a = std::countr_zero(w);
        w &= w - 1;
        present += std::popcount(adj[a] & nb & above(a));
      }
      const int fill = k * (k - 1) / 2 - present;
      if (pick < 0 || fill < pick_fill) {
        pick = v;
        pick_fill = fill;
      }
    }
    pos[pick] = step;
    active &= ~bit(pick);
    const std::uint64_t nb = adj[pick] & active;
    for (std::uint64_t w = nb; w;) {
      const int a = std::countr_zero(w);
      w &= w - 1;
      adj[a] |= nb & ~bit(a);
    }
  }
}

// fill size of the mask graph under the ordering pos (node -> position)
inline int fill_size_under(const std::uint64_t* adj, int p, const int* pos) {
  std::uint64_t perm[kMaskNodes] = {};
  for (int v = 0; v < p; ++v) {
    for (std::uint64_t m = adj[v]; m;) {
      const int u = std::countr_zero(m);
      m &= m - 1;
      perm[pos[v]] |= bit(pos[u]);
    }
  }
  return eliminate(perm, p);
}

inline void from_graph(const Graph& g, std::uint64_t* adj) {
  const int p = g.size();
  std::fill(adj, adj + p, 0);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (g.has_edge(i, j)) {
        adj[i] |= bit(j);
        adj[j] |= bit(i);
      }
}

// positions placing edge (i, j) last with min fill on the rest; i < j
inline void edge_positions(const Graph& g, int i, int j, int* pos) {
  const int p = g.size();
  int rest[kMaskNodes];
  int r = 0;
  for (int v = 0; v < p; ++v)
    if (v != i && v != j) rest[r++] = v;
  std::uint64_t sub[kMaskNodes] = {};
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b)
      if (g.has_edge(rest[a], rest[b])) {
        sub[a] |= bit(b);
        sub[b] |= bit(a);
      }
  int sub_pos[kMaskNodes];
  greedy_min_fill(sub, r, sub_pos);
  int ident[kMaskNodes];
  for (int a = 0; a < r; ++a) ident[a] = a;
  const int* chosen = sub_pos;
  if (r > 0 &&
      fill_size_under(sub, r, sub_pos) > fill_size_under(sub, r, ident)) {
    chosen = ident;
  }
  for (int a = 0; a < r; ++a) pos[rest[a]] = chosen[a];
  pos[i] = p - 2;
  pos[j] = p - 1;
}

}  // namespace gwsv::bitgraph
