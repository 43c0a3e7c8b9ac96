#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include "bosonlr/errors.hpp"
#include "bosonlr/lattice.hpp"

using namespace bosonlr;

namespace {

std::vector<Vertex> ids(const Region& r) { return r.members(); }

std::vector<LatticeGraph> sample_graphs() {
  std::vector<LatticeGraph> out;
  out.push_back(build_chain(1));
  out.push_back(build_chain(7));
  const std::vector<std::size_t> g33{3, 3}, g24{2, 4}, g222{2, 2, 2};
  out.push_back(build_grid(g33));
  out.push_back(build_grid(g24));
  out.push_back(build_grid(g222));
  // a ring with a chord
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {0, 3}};
  out.emplace_back(6, e, 1);
  return out;
}

}  // namespace

TEST_CASE("chain metric and edges") {
  const LatticeGraph c5 = build_chain(5);
  CHECK(c5.distance(0, 4) == 4);
  CHECK(build_chain(1).distance(0, 0) == 0);
  const LatticeGraph c3 = build_chain(3);
  CHECK(c3.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
  for (Vertex i = 0; i < 5; ++i)
    for (Vertex j = 0; j < 5; ++j) CHECK(c5.distance(i, j) == std::abs(i - j));
  CHECK_THROWS_AS(build_chain(0), InvalidArgument);
}

TEST_CASE("grid metric is taxicab") {
  const std::vector<std::size_t> d22{2, 2};
  const LatticeGraph g = build_grid(d22);
  CHECK(g.distance(0, 3) == 2);  // (0,0) -> (1,1)
  const std::vector<std::size_t> d23{2, 3};
  const LatticeGraph g23 = build_grid(d23);
  CHECK(g23.size() == 6);
  CHECK(g23.dim() == 2);
  for (Vertex a = 0; a < 6; ++a)
    for (Vertex b = 0; b < 6; ++b)
      CHECK(g23.distance(a, b) == std::abs(a / 3 - b / 3) + std::abs(a % 3 - b % 3));

  const std::vector<std::size_t> d3{3};
  const LatticeGraph line = build_grid(d3);
  CHECK(line.edges() == build_chain(3).edges());
  const std::vector<std::size_t> empty;
  CHECK_THROWS_AS(build_grid(empty), InvalidArgument);
}

TEST_CASE("graph construction guards") {
  const std::vector<Edge> loop{{0, 0}};
  CHECK_THROWS_AS(LatticeGraph(1, loop, 1), InvalidArgument);
  const std::vector<Edge> split{{0, 1}, {2, 3}};
  CHECK_THROWS_AS(LatticeGraph(4, split, 1), InvalidArgument);
  const std::vector<Edge> bad{{0, 5}};
  CHECK_THROWS_AS(LatticeGraph(2, bad, 1), InvalidArgument);
  CHECK_THROWS_AS(LatticeGraph(LatticeGraph::kMaxVertices + 1, {}, 1), ResourceLimit);
}

TEST_CASE("metric axioms on sample graphs") {
  for (const LatticeGraph& g : sample_graphs()) {
    const auto n = static_cast<Vertex>(g.size());
    for (Vertex x = 0; x < n; ++x) {
      CHECK(g.distance(x, x) == 0);
      for (Vertex y = 0; y < n; ++y) {
        CHECK(g.distance(x, y) == g.distance(y, x));
        const bool edge = std::ranges::find(g.edges(), Edge{std::min(x, y), std::max(x, y)}) !=
                          g.edges().end();
        CHECK((g.distance(x, y) == 1) == edge);
        for (Vertex z = 0; z < n; ++z) CHECK(g.distance(x, z) <= g.distance(x, y) + g.distance(y, z));
      }
    }
  }
}

TEST_CASE("regions") {
  const LatticeGraph g = build_chain(5);
  const Region r(g, {3, 1, 3});
  CHECK(ids(r) == std::vector<Vertex>{1, 3});
  CHECK_THROWS_AS(Region(g, {7}), InvalidArgument);
  CHECK(r.subregion({3}).members() == std::vector<Vertex>{3});
  CHECK_THROWS_AS(r.subregion({2}), InvalidArgument);
}

TEST_CASE("enlargement examples") {
  const LatticeGraph g = build_chain(5);
  CHECK(ids(enlargement(g, Region(g, {2}), 1)) == std::vector<Vertex>{1, 2, 3});
  CHECK(ids(enlargement(g, Region(g, {0}), 10)) == std::vector<Vertex>{0, 1, 2, 3, 4});
  const Region X(g, {0, 4});
  CHECK(enlargement(g, X, 0) == X);
  CHECK_THROWS_AS(enlargement(g, Region(), 1), InvalidArgument);
}

TEST_CASE("enlargement properties") {
  std::mt19937 rng(7);
  for (const LatticeGraph& g : sample_graphs()) {
    const auto n = static_cast<Vertex>(g.size());
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Vertex> m{static_cast<Vertex>(rng() % n)};
      if (n > 1) m.push_back(static_cast<Vertex>(rng() % n));
      const Region X(g, m);
      for (int a = 0; a <= 3; ++a) {
        const Region Xa = enlargement(g, X, a);
        CHECK(X.is_subset_of(Xa));
        CHECK(Xa.is_subset_of(enlargement(g, X, a + 1)));
        for (int b = 0; b <= 3; ++b) {
          // all sample graphs are connected, so composition is exact
          CHECK(enlargement(g, Xa, b) == enlargement(g, X, a + b));
        }
      }
    }
  }
}

TEST_CASE("boundary examples") {
  const LatticeGraph g = build_chain(5);
  CHECK(ids(boundary(g, Region(g, {0, 1, 2}))) == std::vector<Vertex>{2});
  CHECK(boundary(g, Region::whole(g)).empty());

  const std::vector<std::size_t> d33{3, 3};
  const LatticeGraph grid = build_grid(d33);
  const Region plus = enlargement(grid, Region(grid, {4}), 1);
  CHECK(ids(plus) == std::vector<Vertex>{1, 3, 4, 5, 7});
  CHECK(ids(boundary(grid, plus)) == std::vector<Vertex>{1, 3, 5, 7});
}

TEST_CASE("boundary properties") {
  for (const LatticeGraph& g : sample_graphs()) {
    for (Vertex x = 0; x < static_cast<Vertex>(g.size()); ++x) {
      for (int ell = 0; ell <= 2; ++ell) {
        const Region X = enlargement(g, Region(g, {x}), ell);
        const Region dX = boundary(g, X);
        CHECK(dX.is_subset_of(X));
        if (X.size() < g.size()) {
          const Region Xc = complement(g, X);
          for (Vertex y : dX) CHECK_FALSE(Xc.contains(y));
          for (Vertex y : dX) CHECK(distance_to(g, y, Xc) == 1);
        }
      }
    }
  }
}

TEST_CASE("surface parameter") {
  CHECK(surface_parameter(build_chain(21), 5).sigma == 2.0);
  CHECK(surface_parameter(build_chain(21), 5).max_degree == 2);
  // Every ball in chain(3) that is not the whole chain has one boundary point.
  CHECK(surface_parameter(build_chain(3), 5).sigma == 1.0);

  // 9 x 9 grid by brute force on coordinates.
  const std::vector<std::size_t> d99{9, 9};
  const LatticeGraph g = build_grid(d99);
  double brute = 0.0;
  for (int cx = 0; cx < 9; ++cx) {
    for (int cy = 0; cy < 9; ++cy) {
      for (int ell = 1; ell <= 3; ++ell) {
        auto in_ball = [&](int x, int y) {
          return x >= 0 && x < 9 && y >= 0 && y < 9 && std::abs(x - cx) + std::abs(y - cy) <= ell;
        };
        int count = 0;
        for (int x = 0; x < 9; ++x) {
          for (int y = 0; y < 9; ++y) {
            if (!in_ball(x, y)) continue;
            const int nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
            bool edge = false;
            for (auto& q : nb) {
              const bool inside = q[0] >= 0 && q[0] < 9 && q[1] >= 0 && q[1] < 9;
              if (inside && !in_ball(q[0], q[1])) edge = true;
            }
            count += edge;
          }
        }
        brute = std::max(brute, count / static_cast<double>(ell));
      }
    }
  }
  const double sigma = surface_parameter(g, 3).sigma;
  CHECK(sigma == brute);
  CHECK(sigma >= 2.0);
  CHECK(sigma <= 4.0);
}

TEST_CASE("ball growth is controlled by sigma") {
  for (const LatticeGraph& g : sample_graphs()) {
    const int lmax = 4;
    const double sigma = surface_parameter(g, lmax).sigma;
    for (Vertex x = 0; x < static_cast<Vertex>(g.size()); ++x) {
      for (int ell = 1; ell <= lmax; ++ell) {
        const double ball = static_cast<double>(enlargement(g, Region(g, {x}), ell).size());
        CHECK(ball <= 1.0 + sigma * std::pow(ell, g.dim()));
      }
    }
  }
  const double sigma = surface_parameter(build_chain(21), 5).sigma;
  for (int ell = 1; ell <= 5; ++ell) {
    CHECK(enlargement(build_chain(21), Region(build_chain(21), {10}), ell).size() <=
          1.0 + sigma * ell);
  }
}
