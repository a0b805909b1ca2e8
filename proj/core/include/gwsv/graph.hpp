#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace gwsv {

// Bijection of {0..p-1}.  pos(i) is the position node i is sent to.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> pos);
  static Permutation identity(int p);

  int size() const { return static_cast<int>(pos_.size()); }
  int pos(int i) const { return pos_[i]; }
  const std::vector<int>& mapping() const { return pos_; }
  Permutation inverse() const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> pos_;
};

// Undirected graph on p labeled nodes.  Dense symmetric adjacency, no
// self-loops.  Values are cheap to copy at the dimensions used here.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int p);
  static Graph complete(int p);
  // edges are 0-indexed pairs; order within a pair does not matter
  static Graph from_edges(int p, const std::vector<std::pair<int, int>>& edges);

  int size() const { return p_; }
  bool has_edge(int i, int j) const { return adj_[i * p_ + j] != 0; }
  void add_edge(int i, int j);
  void remove_edge(int i, int j);
  Graph with_edge(int i, int j) const;
  Graph without_edge(int i, int j) const;

  int edge_count() const;
  int degree(int i) const;
  std::vector<int> neighbors(int i) const;
  // unordered pairs (i, j) with i < j, lexicographic
  std::vector<std::pair<int, int>> edges() const;
  bool is_subgraph_of(const Graph& other) const;
  bool is_complete_subset(const std::vector<int>& nodes) const;

  // subgraph induced by `nodes`, relabeled 0..k-1 in the given order
  Graph induced(const std::vector<int>& nodes) const;
  // node i of the result is node perm.pos(i)... i.e. edges map through pos()
  Graph permuted(const Permutation& perm) const;

  bool operator==(const Graph&) const = default;

 private:
  int p_ = 0;
  std::vector<std::uint8_t> adj_;
};

// List of node subsets, each complete in the source graph, jointly covering
// all nodes and edges.
struct CliqueSet {
  std::vector<std::vector<int>> cliques;
};

// All maximal complete subgraphs (Bron-Kerbosch with pivoting).  Output is
// sorted lexicographically so enumeration order is reproducible.
CliqueSet maximal_cliques(const Graph& g);

// Cheaper cover for very dense graphs: every edge as a 2-clique plus a
// singleton per isolated node.
CliqueSet edge_cover_cliques(const Graph& g);

// Zero-fill elimination closure of g under the given elimination order,
// returned in the original labeling.  Eliminating nodes in that order
// produces nonzeros only on the result.
Graph fill_in_graph(const Graph& g, const Permutation& order);

// Greedy minimum-fill elimination ordering, ties broken by lowest node
// index.  Never worse (in fill count) than the identity ordering.
Permutation min_fill_ordering(const Graph& g);

// Ordering that places edge (i, j) at positions (p-2, p-1) and arranges the
// remaining nodes by min_fill_ordering of the induced subgraph on them.
Permutation edge_permutation(const Graph& g, int i, int j);

// nu[i] = number of neighbors of i with index greater than i
std::vector<int> nu_counts(const Graph& g);

}  // namespace gwsv
