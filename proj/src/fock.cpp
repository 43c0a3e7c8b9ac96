#include "bosonlr/fock.hpp"

#include <algorithm>
#include <atomic>
#include <limits>

#include "bosonlr/errors.hpp"

namespace bosonlr {

namespace {

std::uint64_t next_basis_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return (a > kSaturated - b) ? kSaturated : a + b;
}

// Appends every occupation vector of `remaining` particles on slots
// [slot, sites) in descending lexicographic order.
void fill_sector(std::vector<Occupation>& scratch, std::size_t slot, int remaining,
                 int cap, std::vector<Occupation>& out) {
  const std::size_t sites = scratch.size();
  if (slot + 1 == sites) {
    if (remaining <= cap) {
      scratch[slot] = static_cast<Occupation>(remaining);
      out.insert(out.end(), scratch.begin(), scratch.end());
    }
    return;
  }
  const int rest_capacity = cap * static_cast<int>(sites - slot - 1);
  const int hi = std::min(remaining, cap);
  const int lo = std::max(0, remaining - rest_capacity);
  for (int k = hi; k >= lo; --k) {
    scratch[slot] = static_cast<Occupation>(k);
    fill_sector(scratch, slot + 1, remaining - k, cap, out);
  }
}

// Descending lexicographic enumeration across all totals in [0, max_total].
void fill_all(std::vector<Occupation>& scratch, std::size_t slot, int budget, int cap,
              std::vector<Occupation>& out) {
  const std::size_t sites = scratch.size();
  for (int k = std::min(budget, cap); k >= 0; --k) {
    scratch[slot] = static_cast<Occupation>(k);
    if (slot + 1 == sites) {
      out.insert(out.end(), scratch.begin(), scratch.end());
    } else {
      fill_all(scratch, slot + 1, budget - k, cap, out);
    }
  }
}

}  // namespace

std::size_t count_states(std::size_t sites, int n, int cap) {
  if (n < 0) return 0;
  // ways[k] = number of ways to place k particles on the sites seen so far.
  std::vector<std::size_t> ways(static_cast<std::size_t>(n) + 1, 0);
  ways[0] = 1;
  for (std::size_t s = 0; s < sites; ++s) {
    std::vector<std::size_t> next(ways.size(), 0);
    for (int k = 0; k <= n; ++k) {
      if (ways[k] == 0) continue;
      const int hi = cap < 0 ? n - k : std::min(cap, n - k);
      for (int j = 0; j <= hi; ++j) next[k + j] = saturating_add(next[k + j], ways[k]);
    }
    ways = std::move(next);
  }
  return ways[static_cast<std::size_t>(n)];
}

FockBasis::FockBasis(Region region, BasisSpec spec)
    : region_(std::move(region)), spec_(spec), id_(next_basis_id()) {
  if (region_.empty()) throw InvalidArgument("Fock basis over an empty region");
  if (!spec_.sector && !spec_.max_total && !spec_.cap) {
    throw InvalidArgument("Fock basis needs a sector, a total bound or a per-site cap");
  }
  for (const auto& v : {spec_.sector, spec_.max_total, spec_.cap}) {
    if (v && *v < 0) throw InvalidArgument("basis bounds must be nonnegative");
  }
  const std::size_t sites = region_.size();
  const int cap_or_none = spec_.cap.value_or(-1);

  int top_total;
  if (spec_.sector) {
    top_total = *spec_.sector;
  } else if (spec_.max_total) {
    top_total = *spec_.max_total;
  } else {
    top_total = *spec_.cap * static_cast<int>(sites);
  }
  if (spec_.cap) top_total = std::min(top_total, *spec_.cap * static_cast<int>(sites));
  max_occupation_ = spec_.cap ? std::min(*spec_.cap, std::max(top_total, 0)) : top_total;
  if (max_occupation_ > std::numeric_limits<Occupation>::max()) {
    throw ResourceLimit("per-site occupation above 255 is not representable");
  }

  std::size_t expected = 0;
  if (spec_.sector) {
    expected = (*spec_.sector <= top_total) ? count_states(sites, *spec_.sector, cap_or_none) : 0;
  } else {
    for (int n = 0; n <= top_total; ++n) {
      expected = saturating_add(expected, count_states(sites, n, cap_or_none));
    }
  }
  if (expected > kMaxDimension) {
    throw ResourceLimit("Fock basis dimension " +
                        (expected == kSaturated ? std::string("(overflow)")
                                                : std::to_string(expected)) +
                        " exceeds the cap of " + std::to_string(kMaxDimension));
  }

  occupations_.reserve(expected * sites);
  std::vector<Occupation> scratch(sites, 0);
  if (expected > 0) {
    const int cap = spec_.cap.value_or(top_total);
    if (spec_.sector) {
      fill_sector(scratch, 0, *spec_.sector, cap, occupations_);
    } else {
      fill_all(scratch, 0, top_total, cap, occupations_);
    }
  }

  const std::size_t dim = occupations_.size() / sites;
  totals_.resize(dim);
  index_.reserve(dim);
  sector_members_.assign(static_cast<std::size_t>(std::max(top_total, 0)) + 1, {});
  for (std::size_t k = 0; k < dim; ++k) {
    const auto occ = state(k);
    int n = 0;
    for (Occupation o : occ) n += o;
    totals_[k] = n;
    index_.emplace(key_of(occ), k);
    sector_members_[static_cast<std::size_t>(n)].push_back(k);
  }
  for (std::size_t n = 0; n < sector_members_.size(); ++n) {
    if (!sector_members_[n].empty()) sector_list_.push_back(static_cast<int>(n));
  }
}

int FockBasis::slot_of(Vertex x) const {
  const auto& m = region_.members();
  const auto it = std::lower_bound(m.begin(), m.end(), x);
  if (it == m.end() || *it != x) return -1;
  return static_cast<int>(it - m.begin());
}

std::optional<std::size_t> FockBasis::find(std::span<const Occupation> occ) const {
  if (occ.size() != num_sites()) return std::nullopt;
  const auto it = index_.find(key_of(occ));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FockBasis::index_of(std::span<const Occupation> occ) const {
  if (auto k = find(occ)) return *k;
  std::string text = "(";
  for (std::size_t i = 0; i < occ.size(); ++i) {
    text += (i ? "," : "") + std::to_string(occ[i]);
  }
  throw NotInBasis("occupation " + text + ") is not in the basis");
}

const std::vector<std::size_t>& FockBasis::sector_indices(int n) const {
  static const std::vector<std::size_t> kEmpty;
  if (n < 0 || static_cast<std::size_t>(n) >= sector_members_.size()) return kEmpty;
  return sector_members_[static_cast<std::size_t>(n)];
}

bool FockBasis::is_complete() const {
  if (spec_.sector) return true;
  if (!spec_.cap) return false;
  const int full = *spec_.cap * static_cast<int>(num_sites());
  return !spec_.max_total || *spec_.max_total >= full;
}

FockBasis enumerate_basis(const Region& region, std::optional<int> sector,
                          std::optional<int> cap) {
  return FockBasis(region, BasisSpec{sector, std::nullopt, cap});
}

FockBasis enumerate_basis(const Region& region, const BasisSpec& spec) {
  return FockBasis(region, spec);
}

}  // namespace bosonlr
