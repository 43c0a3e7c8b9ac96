#include "bosonlr/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "bosonlr/errors.hpp"

namespace bosonlr {

namespace {

std::uint64_t next_graph_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

constexpr int kUnreached = std::numeric_limits<int>::max();

}  // namespace

LatticeGraph::LatticeGraph(std::size_t num_vertices, std::span<const Edge> edges,
                           int dim_hint)
    : num_vertices_(num_vertices), dim_hint_(dim_hint), id_(next_graph_id()) {
  if (num_vertices == 0) throw InvalidArgument("graph must have at least one vertex");
  if (num_vertices > kMaxVertices) {
    throw ResourceLimit("graph has " + std::to_string(num_vertices) +
                        " vertices; cap is " + std::to_string(kMaxVertices));
  }
  if (dim_hint < 1) throw InvalidArgument("dimension hint must be positive");

  adjacency_.resize(num_vertices);
  for (auto [a, b] : edges) {
    if (a == b) throw InvalidArgument("self-loop at vertex " + std::to_string(a));
    if (!has_vertex(a) || !has_vertex(b)) {
      throw InvalidArgument("edge {" + std::to_string(a) + "," + std::to_string(b) +
                            "} references a missing vertex");
    }
    edges_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (auto [a, b] : edges_) {
    adjacency_[static_cast<std::size_t>(a)].push_back(b);
    adjacency_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());

  dist_.assign(num_vertices * num_vertices, kUnreached);
  std::vector<Vertex> queue;
  queue.reserve(num_vertices);
  for (std::size_t src = 0; src < num_vertices; ++src) {
    int* row = dist_.data() + src * num_vertices;
    row[src] = 0;
    queue.clear();
    queue.push_back(static_cast<Vertex>(src));
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex u = queue[head];
      for (Vertex w : adjacency_[static_cast<std::size_t>(u)]) {
        if (row[w] == kUnreached) {
          row[w] = row[u] + 1;
          queue.push_back(w);
        }
      }
    }
    if (queue.size() != num_vertices) throw InvalidArgument("graph is disconnected");
  }
}

std::size_t LatticeGraph::max_degree() const {
  std::size_t best = 0;
  for (const auto& nb : adjacency_) best = std::max(best, nb.size());
  return best;
}

int LatticeGraph::diameter() const {
  return *std::max_element(dist_.begin(), dist_.end());
}

LatticeGraph build_chain(std::size_t length) {
  if (length == 0) throw InvalidArgument("chain length must be >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < length; ++i) {
    edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(i + 1));
  }
  return LatticeGraph(length, edges, 1);
}

LatticeGraph build_grid(std::span<const std::size_t> dims) {
  if (dims.empty()) throw InvalidArgument("grid needs at least one dimension");
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw InvalidArgument("grid extents must be >= 1");
    total *= d;
    if (total > LatticeGraph::kMaxVertices) {
      throw ResourceLimit("grid exceeds the vertex cap");
    }
  }
  // Row-major strides, last coordinate fastest.
  std::vector<std::size_t> stride(dims.size(), 1);
  for (std::size_t k = dims.size() - 1; k-- > 0;) stride[k] = stride[k + 1] * dims[k + 1];

  std::vector<Edge> edges;
  for (std::size_t v = 0; v < total; ++v) {
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const std::size_t coord = (v / stride[k]) % dims[k];
      if (coord + 1 < dims[k]) {
        edges.emplace_back(static_cast<Vertex>(v), static_cast<Vertex>(v + stride[k]));
      }
    }
  }
  return LatticeGraph(total, edges, static_cast<int>(dims.size()));
}

Region::Region(const LatticeGraph& g, std::vector<Vertex> members)
    : graph_id_(g.id()), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  for (Vertex x : members_) {
    if (!g.has_vertex(x)) {
      throw InvalidArgument("region member " + std::to_string(x) + " is not a vertex");
    }
  }
}

Region Region::subregion(std::vector<Vertex> members) const {
  Region r;
  r.graph_id_ = graph_id_;
  r.members_ = std::move(members);
  std::sort(r.members_.begin(), r.members_.end());
  r.members_.erase(std::unique(r.members_.begin(), r.members_.end()), r.members_.end());
  for (Vertex x : r.members_) {
    if (!contains(x)) {
      throw InvalidArgument("site " + std::to_string(x) + " is outside the region");
    }
  }
  return r;
}

Region Region::whole(const LatticeGraph& g) {
  std::vector<Vertex> all(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) all[i] = static_cast<Vertex>(i);
  return Region(g, std::move(all));
}

bool Region::contains(Vertex x) const {
  return std::binary_search(members_.begin(), members_.end(), x);
}

bool Region::is_subset_of(const Region& other) const {
  return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                       members_.end());
}

int distance_to(const LatticeGraph& g, Vertex x, const Region& X) {
  int best = kUnreached;
  for (Vertex y : X) best = std::min(best, g.distance(x, y));
  return best;
}

int distance_between(const LatticeGraph& g, const Region& X, const Region& Y) {
  if (X.empty() || Y.empty()) throw InvalidArgument("distance between empty regions");
  int best = kUnreached;
  for (Vertex x : X) best = std::min(best, distance_to(g, x, Y));
  return best;
}

Region complement(const LatticeGraph& g, const Region& X) {
  std::vector<Vertex> rest;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto v = static_cast<Vertex>(i);
    if (!X.contains(v)) rest.push_back(v);
  }
  return Region(g, std::move(rest));
}

Region enlargement(const LatticeGraph& g, const Region& X, int ell) {
  if (X.empty()) throw InvalidArgument("enlargement of an empty region");
  if (ell < 0) throw InvalidArgument("enlargement radius must be nonnegative");
  std::vector<Vertex> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto v = static_cast<Vertex>(i);
    if (distance_to(g, v, X) <= ell) out.push_back(v);
  }
  return Region(g, std::move(out));
}

Region boundary(const LatticeGraph& g, const Region& X) {
  std::vector<Vertex> out;
  for (Vertex x : X) {
    for (Vertex y : g.neighbors(x)) {
      if (!X.contains(y)) {
        out.push_back(x);
        break;
      }
    }
  }
  return Region(g, std::move(out));
}

SurfaceParameter surface_parameter(const LatticeGraph& g, int ell_max) {
  if (ell_max < 1) throw InvalidArgument("surface_parameter needs ell_max >= 1");
  SurfaceParameter out;
  out.max_degree = g.max_degree();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Region centre(g, {static_cast<Vertex>(i)});
    for (int ell = 1; ell <= ell_max; ++ell) {
      const Region ball = enlargement(g, centre, ell);
      const double ratio = static_cast<double>(boundary(g, ball).size()) /
                           std::pow(static_cast<double>(ell), g.dim() - 1);
      out.sigma = std::max(out.sigma, ratio);
      if (ball.size() == g.size()) break;
    }
  }
  return out;
}

}  // namespace bosonlr
