#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <functional>
#include <set>

#include "bosonlr/errors.hpp"
#include "bosonlr/fock.hpp"

using namespace bosonlr;

namespace {

Region sites(std::size_t n) { return Region::whole(build_chain(n)); }

std::vector<std::vector<int>> states_of(const FockBasis& b) {
  std::vector<std::vector<int>> out;
  for (std::size_t k = 0; k < b.dimension(); ++k) {
    const auto s = b.state(k);
    out.emplace_back(s.begin(), s.end());
  }
  return out;
}

// Independent oracle: every vector in {0..limit}^s, filtered.
std::set<std::vector<int>> brute_force(std::size_t s, int limit, const std::function<bool(const std::vector<int>&)>& keep) {
  std::set<std::vector<int>> out;
  std::vector<int> v(s, 0);
  while (true) {
    if (keep(v)) out.insert(v);
    std::size_t i = 0;
    while (i < s && v[i] == limit) v[i++] = 0;
    if (i == s) break;
    ++v[i];
  }
  return out;
}

int sum(const std::vector<int>& v) {
  int t = 0;
  for (int x : v) t += x;
  return t;
}

}  // namespace

TEST_CASE("enumeration examples") {
  const FockBasis b = enumerate_basis(sites(2), 2, std::nullopt);
  CHECK(b.dimension() == 3);
  CHECK(states_of(b) == std::vector<std::vector<int>>{{2, 0}, {1, 1}, {0, 2}});

  CHECK(enumerate_basis(sites(3), 2, std::nullopt).dimension() == 6);
  const FockBasis hard = enumerate_basis(sites(3), 2, 1);
  CHECK(states_of(hard) == std::vector<std::vector<int>>{{1, 1, 0}, {1, 0, 1}, {0, 1, 1}});
}

TEST_CASE("dimension examples") {
  CHECK(dimension(enumerate_basis(sites(1), 0, std::nullopt)) == 1);
  CHECK(dimension(enumerate_basis(sites(4), 3, std::nullopt)) == 20);
  CHECK(dimension(enumerate_basis(sites(2), 5, 2)) == 0);
}

TEST_CASE("enumeration matches brute force") {
  for (std::size_t s = 1; s <= 4; ++s) {
    for (int n = 0; n <= 4; ++n) {
      for (int cap : {-1, 0, 1, 2, 3}) {
        const std::optional<int> c = cap < 0 ? std::nullopt : std::optional<int>(cap);
        const FockBasis b = enumerate_basis(sites(s), n, c);
        const auto expect = brute_force(s, 4, [&](const std::vector<int>& v) {
          return sum(v) == n && (cap < 0 || std::ranges::all_of(v, [&](int x) { return x <= cap; }));
        });
        const auto got = states_of(b);
        CHECK(std::set<std::vector<int>>(got.begin(), got.end()) == expect);
        CHECK(got.size() == expect.size());
        CHECK(got.size() == count_states(s, n, cap));
        // strictly descending lexicographic order
        for (std::size_t k = 1; k < got.size(); ++k) CHECK(got[k - 1] > got[k]);
      }
    }
  }
}

TEST_CASE("stars and bars") {
  auto binom = [](int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<std::size_t>(r + 0.5);
  };
  for (std::size_t s = 1; s <= 5; ++s)
    for (int n = 0; n <= 5; ++n)
      CHECK(enumerate_basis(sites(s), n, std::nullopt).dimension() ==
            binom(n + static_cast<int>(s) - 1, n));
}

TEST_CASE("sector decomposition of the capped space") {
  for (std::size_t s = 1; s <= 4; ++s) {
    for (int c = 0; c <= 3; ++c) {
      std::size_t total = 0;
      for (int n = 0; n <= static_cast<int>(s) * c; ++n) total += enumerate_basis(sites(s), n, c).dimension();
      std::size_t full = 1;
      for (std::size_t i = 0; i < s; ++i) full *= static_cast<std::size_t>(c + 1);
      CHECK(total == full);
      const FockBasis whole = enumerate_basis(sites(s), std::nullopt, c);
      CHECK(whole.dimension() == full);
      CHECK(whole.is_complete());
    }
  }
}

TEST_CASE("index round trip and errors") {
  const FockBasis b(sites(3), {std::nullopt, 3, 2});
  CHECK(b.index_of(b.state(0)) == 0);
  for (std::size_t k = 0; k < b.dimension(); ++k) CHECK(index_of(b, b.state(k)) == k);
  const std::vector<Occupation> over{3, 0, 0};
  CHECK_THROWS_AS(b.index_of(over), NotInBasis);
  const std::vector<Occupation> too_many{2, 2, 0};
  CHECK_THROWS_AS(b.index_of(too_many), NotInBasis);
  CHECK_FALSE(b.find(over).has_value());
  CHECK_FALSE(b.is_complete());
}

TEST_CASE("sectors and totals") {
  const FockBasis b(sites(3), {std::nullopt, 3, std::nullopt});
  CHECK(b.sectors() == std::vector<int>{0, 1, 2, 3});
  std::size_t covered = 0;
  for (int n : b.sectors()) {
    for (std::size_t k : b.sector_indices(n)) CHECK(b.total(k) == n);
    covered += b.sector_indices(n).size();
  }
  CHECK(covered == b.dimension());
  CHECK(b.max_occupation() == 3);
}

TEST_CASE("deterministic enumeration") {
  const FockBasis a(sites(4), {std::nullopt, 4, 3});
  const FockBasis b(sites(4), {std::nullopt, 4, 3});
  CHECK(states_of(a) == states_of(b));
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(enumerate_basis(Region(), 1, std::nullopt), InvalidArgument);
  CHECK_THROWS_AS(FockBasis(sites(2), {}), InvalidArgument);
  CHECK_THROWS_AS(FockBasis(sites(30), {std::nullopt, std::nullopt, 2}), ResourceLimit);
}
