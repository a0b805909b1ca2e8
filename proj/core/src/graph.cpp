#include "gwsv/graph.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "gwsv/errors.hpp"

namespace gwsv {

// Bitmask fast paths for graphs with at most 64 nodes.  The elimination and
// ordering routines sit on the inner loop of every edge move, so they avoid
// heap traffic entirely; results are identical to the general versions.
namespace {

constexpr int kMaskNodes = 64;

inline std::uint64_t bit(int i) { return std::uint64_t{1} << i; }

inline std::uint64_t above(int i) {
  return i + 1 >= kMaskNodes ? 0 : ~std::uint64_t{0} << (i + 1);
}

// symbolic elimination in place; returns the number of added edges
inline int eliminate_masks(std::uint64_t* adj, int p) {
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
inline void greedy_min_fill_masks(const std::uint64_t* adj_in, int p,
                                  int* pos) {
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

// fill size of g under the ordering pos (node -> position)
inline int mask_fill_size(const std::uint64_t* adj, int p, const int* pos) {
  std::uint64_t perm[kMaskNodes] = {};
  for (int v = 0; v < p; ++v) {
    for (std::uint64_t m = adj[v]; m;) {
      const int u = std::countr_zero(m);
      m &= m - 1;
      perm[pos[v]] |= bit(pos[u]);
    }
  }
  return eliminate_masks(perm, p);
}

inline void graph_to_masks(const Graph& g, std::uint64_t* adj) {
  const int p = g.size();
  std::fill(adj, adj + p, 0);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (g.has_edge(i, j)) {
        adj[i] |= bit(j);
        adj[j] |= bit(i);
      }
}

}  // namespace

Permutation::Permutation(std::vector<int> pos) : pos_(std::move(pos)) {
  std::vector<char> seen(pos_.size(), 0);
  for (int v : pos_) {
    if (v < 0 || v >= static_cast<int>(pos_.size()) || seen[v]) {
      throw ConfigError("permutation is not a bijection");
    }
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int p) {
  std::vector<int> pos(p);
  std::iota(pos.begin(), pos.end(), 0);
  return Permutation(std::move(pos));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(pos_.size());
  for (int i = 0; i < size(); ++i) inv[pos_[i]] = i;
  return Permutation(std::move(inv));
}

Graph::Graph(int p) : p_(p), adj_(static_cast<std::size_t>(p) * p, 0) {}

Graph Graph::complete(int p) {
  Graph g(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) g.add_edge(i, j);
  return g;
}

Graph Graph::from_edges(int p, const std::vector<std::pair<int, int>>& edges) {
  Graph g(p);
  for (auto [i, j] : edges) g.add_edge(i, j);
  return g;
}

void Graph::add_edge(int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= p_ || j >= p_) {
    throw ConfigError("invalid edge");
  }
  adj_[i * p_ + j] = adj_[j * p_ + i] = 1;
}

void Graph::remove_edge(int i, int j) {
  adj_[i * p_ + j] = adj_[j * p_ + i] = 0;
}

Graph Graph::with_edge(int i, int j) const {
  Graph g = *this;
  g.add_edge(i, j);
  return g;
}

Graph Graph::without_edge(int i, int j) const {
  Graph g = *this;
  g.remove_edge(i, j);
  return g;
}

int Graph::edge_count() const {
  int n = 0;
  for (int i = 0; i < p_; ++i)
    for (int j = i + 1; j < p_; ++j) n += has_edge(i, j);
  return n;
}

int Graph::degree(int i) const {
  int n = 0;
  for (int j = 0; j < p_; ++j) n += adj_[i * p_ + j];
  return n;
}

std::vector<int> Graph::neighbors(int i) const {
  std::vector<int> out;
  for (int j = 0; j < p_; ++j)
    if (adj_[i * p_ + j]) out.push_back(j);
  return out;
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < p_; ++i)
    for (int j = i + 1; j < p_; ++j)
      if (has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

bool Graph::is_subgraph_of(const Graph& other) const {
  if (p_ != other.p_) return false;
  for (int i = 0; i < p_; ++i)
    for (int j = i + 1; j < p_; ++j)
      if (has_edge(i, j) && !other.has_edge(i, j)) return false;
  return true;
}

bool Graph::is_complete_subset(const std::vector<int>& nodes) const {
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b)
      if (!has_edge(nodes[a], nodes[b])) return false;
  return true;
}

Graph Graph::induced(const std::vector<int>& nodes) const {
  Graph g(static_cast<int>(nodes.size()));
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b)
      if (has_edge(nodes[a], nodes[b]))
        g.add_edge(static_cast<int>(a), static_cast<int>(b));
  return g;
}

Graph Graph::permuted(const Permutation& perm) const {
  Graph g(p_);
  for (int i = 0; i < p_; ++i)
    for (int j = i + 1; j < p_; ++j)
      if (has_edge(i, j)) g.add_edge(perm.pos(i), perm.pos(j));
  return g;
}

namespace {

void bron_kerbosch(const Graph& g, std::vector<int>& r, std::vector<int> p,
                   std::vector<int> x, std::vector<std::vector<int>>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  // pivot: element of P u X with most neighbors in P (first such, for
  // deterministic output)
  int pivot = -1, best = -1;
  for (int u : p) {
    int n = 0;
    for (int v : p) n += g.has_edge(u, v);
    if (n > best) best = n, pivot = u;
  }
  for (int u : x) {
    int n = 0;
    for (int v : p) n += g.has_edge(u, v);
    if (n > best) best = n, pivot = u;
  }
  std::vector<int> cand;
  for (int v : p)
    if (!g.has_edge(pivot, v)) cand.push_back(v);
  for (int v : cand) {
    std::vector<int> p2, x2;
    for (int w : p)
      if (g.has_edge(v, w)) p2.push_back(w);
    for (int w : x)
      if (g.has_edge(v, w)) x2.push_back(w);
    r.push_back(v);
    bron_kerbosch(g, r, std::move(p2), std::move(x2), out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

}  // namespace

CliqueSet maximal_cliques(const Graph& g) {
  std::vector<int> all(g.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::vector<int>> cliques;
  std::vector<int> r;
  bron_kerbosch(g, r, all, {}, cliques);
  for (auto& c : cliques) std::sort(c.begin(), c.end());
  std::sort(cliques.begin(), cliques.end());
  return CliqueSet{std::move(cliques)};
}

CliqueSet edge_cover_cliques(const Graph& g) {
  CliqueSet cs;
  for (auto [i, j] : g.edges()) cs.cliques.push_back({i, j});
  for (int i = 0; i < g.size(); ++i)
    if (g.degree(i) == 0) cs.cliques.push_back({i});
  return cs;
}

Graph fill_in_graph(const Graph& g, const Permutation& order) {
  const int p = g.size();
  if (order.size() != p) throw ConfigError("ordering size mismatch");
  if (p <= kMaskNodes) {
    // eliminate in position space, then map back to node labels
    std::uint64_t adj[kMaskNodes] = {};
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        if (g.has_edge(i, j)) {
          adj[order.pos(i)] |= bit(order.pos(j));
          adj[order.pos(j)] |= bit(order.pos(i));
        }
      }
    }
    eliminate_masks(adj, p);
    Graph out(p);
    for (int i = 0; i < p; ++i) {
      const int a = order.pos(i);
      for (int j = i + 1; j < p; ++j)
        if (adj[a] & bit(order.pos(j))) out.add_edge(i, j);
    }
    return out;
  }
  // general path: run symbolic elimination in position space, then map back
  Graph work = g.permuted(order);
  for (int v = 0; v < p; ++v) {
    std::vector<int> higher;
    for (int u = v + 1; u < p; ++u)
      if (work.has_edge(v, u)) higher.push_back(u);
    for (std::size_t a = 0; a < higher.size(); ++a)
      for (std::size_t b = a + 1; b < higher.size(); ++b)
        work.add_edge(higher[a], higher[b]);
  }
  return work.permuted(order.inverse());
}

namespace {

int fill_count(const Graph& g, const Permutation& order) {
  return fill_in_graph(g, order).edge_count() - g.edge_count();
}

}  // namespace

Permutation min_fill_ordering(const Graph& g) {
  const int p = g.size();
  if (p <= kMaskNodes) {
    std::uint64_t adj[kMaskNodes];
    graph_to_masks(g, adj);
    std::vector<int> pos(p);
    greedy_min_fill_masks(adj, p, pos.data());
    std::vector<int> ident(p);
    std::iota(ident.begin(), ident.end(), 0);
    if (mask_fill_size(adj, p, pos.data()) <=
        mask_fill_size(adj, p, ident.data())) {
      return Permutation(std::move(pos));
    }
    return Permutation(std::move(ident));
  }
  Graph work = g;
  std::vector<char> done(p, 0);
  std::vector<int> pos(p, -1);
  for (int step = 0; step < p; ++step) {
    int pick = -1, pick_fill = -1;
    for (int v = 0; v < p; ++v) {
      if (done[v]) continue;
      std::vector<int> nb;
      for (int u = 0; u < p; ++u)
        if (!done[u] && work.has_edge(v, u)) nb.push_back(u);
      int fill = 0;
      for (std::size_t a = 0; a < nb.size(); ++a)
        for (std::size_t b = a + 1; b < nb.size(); ++b)
          fill += !work.has_edge(nb[a], nb[b]);
      if (pick < 0 || fill < pick_fill) {
        pick = v;
        pick_fill = fill;
      }
    }
    pos[pick] = step;
    done[pick] = 1;
    std::vector<int> nb;
    for (int u = 0; u < p; ++u)
      if (!done[u] && work.has_edge(pick, u)) nb.push_back(u);
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b)
        if (!work.has_edge(nb[a], nb[b])) work.add_edge(nb[a], nb[b]);
  }
  Permutation greedy(std::move(pos));
  // the greedy heuristic has no worst-case guarantee, so never return an
  // ordering that loses to the trivial one
  Permutation ident = Permutation::identity(p);
  if (fill_count(g, greedy) <= fill_count(g, ident)) return greedy;
  return ident;
}

Permutation edge_permutation(const Graph& g, int i, int j) {
  const int p = g.size();
  if (i == j || i < 0 || j < 0 || i >= p || j >= p)
    throw ConfigError("invalid edge for permutation");
  if (i > j) std::swap(i, j);
  if (p <= kMaskNodes) {
    // induced subgraph on V \ {i, j}, compressed to 0..p-3
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
    greedy_min_fill_masks(sub, r, sub_pos);
    int ident[kMaskNodes];
    std::iota(ident, ident + r, 0);
    const int* chosen = sub_pos;
    if (r > 0 && mask_fill_size(sub, r, sub_pos) >
                     mask_fill_size(sub, r, ident)) {
      chosen = ident;
    }
    std::vector<int> pos(p, -1);
    for (int a = 0; a < r; ++a) pos[rest[a]] = chosen[a];
    pos[i] = p - 2;
    pos[j] = p - 1;
    return Permutation(std::move(pos));
  }
  std::vector<int> rest;
  for (int v = 0; v < p; ++v)
    if (v != i && v != j) rest.push_back(v);
  Permutation sub = min_fill_ordering(g.induced(rest));
  std::vector<int> pos(p, -1);
  for (std::size_t a = 0; a < rest.size(); ++a) pos[rest[a]] = sub.pos(static_cast<int>(a));
  pos[i] = p - 2;
  pos[j] = p - 1;
  return Permutation(std::move(pos));
}

std::vector<int> nu_counts(const Graph& g) {
  std::vector<int> nu(g.size(), 0);
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j) nu[i] += g.has_edge(i, j);
  return nu;
}

}  // namespace gwsv
