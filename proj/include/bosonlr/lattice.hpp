#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace bosonlr {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>;

/// Finite connected graph with an all-pairs geodesic (hop) distance table.
///
/// Distances are filled by one BFS per vertex at construction, so queries
/// are O(1). Graphs are capped at kMaxVertices; the table is n^2 ints.
class LatticeGraph {
 public:
  static constexpr std::size_t kMaxVertices = 4096;

  /// Throws InvalidArgument on self-loops, out-of-range endpoints, a
  /// disconnected graph or dim_hint < 1, and ResourceLimit above the cap.
  LatticeGraph(std::size_t num_vertices, std::span<const Edge> edges,
               int dim_hint);

  std::size_t size() const { return num_vertices_; }
  int dim() const { return dim_hint_; }
  std::uint64_t id() const { return id_; }

  int distance(Vertex x, Vertex y) const {
    return dist_[static_cast<std::size_t>(x) * num_vertices_ +
                 static_cast<std::size_t>(y)];
  }
  std::span<const Vertex> neighbors(Vertex x) const {
    return adjacency_[static_cast<std::size_t>(x)];
  }
  /// Unordered edges {x, y} with x < y, sorted.
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_vertex(Vertex x) const {
    return x >= 0 && static_cast<std::size_t>(x) < num_vertices_;
  }

  std::size_t max_degree() const;
  int diameter() const;

 private:
  std::size_t num_vertices_;
  int dim_hint_;
  std::uint64_t id_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<int> dist_;
};

/// Path graph 0 - 1 - ... - (length-1), dimension 1.
LatticeGraph build_chain(std::size_t length);

/// Open-boundary nearest-neighbour box. Vertex ids are row-major with the
/// last coordinate fastest; dimension = dims.size().
LatticeGraph build_grid(std::span<const std::size_t> dims);

/// Sorted, deduplicated vertex set tied to one graph.
class Region {
 public:
  Region() = default;
  /// Throws InvalidArgument if any id is not a vertex of `g`.
  Region(const LatticeGraph& g, std::vector<Vertex> members);

  static Region whole(const LatticeGraph& g);
  /// Subset of this region; throws InvalidArgument for ids not in it.
  Region subregion(std::vector<Vertex> members) const;

  std::uint64_t graph_id() const { return graph_id_; }
  const std::vector<Vertex>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(Vertex x) const;
  bool is_subset_of(const Region& other) const;
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::uint64_t graph_id_ = 0;
  std::vector<Vertex> members_;
};

/// d(x, X) = min over members of X.
int distance_to(const LatticeGraph& g, Vertex x, const Region& X);
/// d(X, Y); both regions nonempty.
int distance_between(const LatticeGraph& g, const Region& X, const Region& Y);

Region complement(const LatticeGraph& g, const Region& X);

/// X[l] = {x : d(x, X) <= l}. Throws InvalidArgument for empty X.
Region enlargement(const LatticeGraph& g, const Region& X, int ell);

/// Interior boundary {x in X : d(x, X^c) = 1}; empty when X is the whole graph.
Region boundary(const LatticeGraph& g, const Region& X);

struct SurfaceParameter {
  /// max over x and 1 <= l <= l_max of |boundary(x[l])| / l^(d-1).
  double sigma = 0.0;
  /// Coordination bound; this is the sigma the Gronwall moment rate uses.
  std::size_t max_degree = 0;
};

SurfaceParameter surface_parameter(const LatticeGraph& g, int ell_max);

}  // namespace bosonlr
