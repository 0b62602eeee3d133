#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "golazo/error.hpp"

namespace golazo {

/// Undirected simple graph on vertices 0..d-1. Edges are stored once as
/// (i, j) with i < j, sorted.
class GraphSpec {
 public:
  using Index = Eigen::Index;
  using Edge = std::pair<Index, Index>;

  GraphSpec() = default;
  explicit GraphSpec(Index d) : d_(d), adj_(static_cast<size_t>(d * d), 0) {
    if (d < 1) throw Error(ErrorCode::InvalidGraph, "graph needs at least one vertex");
  }
  GraphSpec(Index d, const std::vector<Edge>& edges) : GraphSpec(d) {
    for (auto [i, j] : edges) add_edge(i, j);
  }

  static GraphSpec complete(Index d) {
    GraphSpec g(d);
    for (Index i = 0; i < d; ++i)
      for (Index j = i + 1; j < d; ++j) g.add_edge(i, j);
    return g;
  }
  static GraphSpec chain(Index d) {
    GraphSpec g(d);
    for (Index i = 0; i + 1 < d; ++i) g.add_edge(i, i + 1);
    return g;
  }
  static GraphSpec cycle(Index d) {
    GraphSpec g = chain(d);
    if (d > 2) g.add_edge(0, d - 1);
    return g;
  }
  /// Support graph of a symmetric matrix: |a_ij| > threshold off the diagonal.
  template <typename Derived>
  static GraphSpec support(const Eigen::MatrixBase<Derived>& a, double threshold) {
    GraphSpec g(a.rows());
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = i + 1; j < a.cols(); ++j)
        if (std::abs(static_cast<double>(a(i, j))) > threshold) g.add_edge(i, j);
    return g;
  }

  void add_edge(Index i, Index j) {
    if (i == j) throw Error(ErrorCode::InvalidGraph, "self-loops are not allowed");
    if (i < 0 || j < 0 || i >= d_ || j >= d_)
      throw Error(ErrorCode::InvalidGraph, "edge endpoint out of range");
    if (i > j) std::swap(i, j);
    if (has_edge(i, j)) return;
    adj_[static_cast<size_t>(i * d_ + j)] = 1;
    adj_[static_cast<size_t>(j * d_ + i)] = 1;
    edges_.insert(std::upper_bound(edges_.begin(), edges_.end(), Edge{i, j}), Edge{i, j});
  }

  bool has_edge(Index i, Index j) const {
    return i != j && adj_[static_cast<size_t>(i * d_ + j)] != 0;
  }

  Index dim() const { return d_; }
  const std::vector<Edge>& edges() const { return edges_; }
  size_t edge_count() const { return edges_.size(); }

  std::vector<Index> neighbours(Index v) const {
    std::vector<Index> out;
    for (Index u = 0; u < d_; ++u)
      if (has_edge(u, v)) out.push_back(u);
    return out;
  }

  friend bool operator==(const GraphSpec& a, const GraphSpec& b) {
    return a.d_ == b.d_ && a.edges_ == b.edges_;
  }

 private:
  Index d_ = 0;
  std::vector<char> adj_;
  std::vector<Edge> edges_;
};

/// Maximum cardinality search order; reversed, it is a perfect elimination
/// ordering iff the graph is chordal.
inline std::vector<GraphSpec::Index> max_cardinality_order(const GraphSpec& g) {
  using Index = GraphSpec::Index;
  const Index d = g.dim();
  std::vector<Index> order;
  std::vector<int> weight(static_cast<size_t>(d), 0);
  std::vector<char> done(static_cast<size_t>(d), 0);
  for (Index step = 0; step < d; ++step) {
    Index best = -1;
    for (Index v = 0; v < d; ++v)
      if (!done[v] && (best < 0 || weight[v] > weight[best])) best = v;
    done[best] = 1;
    order.push_back(best);
    for (Index u = 0; u < d; ++u)
      if (!done[u] && g.has_edge(u, best)) ++weight[u];
  }
  return order;
}

inline bool is_decomposable(const GraphSpec& g) {
  using Index = GraphSpec::Index;
  const auto order = max_cardinality_order(g);
  std::vector<Index> pos(order.size());
  for (size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<Index>(k);
  // Earlier neighbours of each vertex in MCS order must form a clique.
  for (Index v : order) {
    std::vector<Index> earlier;
    for (Index u : g.neighbours(v))
      if (pos[u] < pos[v]) earlier.push_back(u);
    for (size_t a = 0; a < earlier.size(); ++a)
      for (size_t b = a + 1; b < earlier.size(); ++b)
        if (!g.has_edge(earlier[a], earlier[b])) return false;
  }
  return true;
}

}  // namespace golazo
