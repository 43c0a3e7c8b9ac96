#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bosonlr/lattice.hpp"

namespace bosonlr {

using Occupation = std::uint8_t;

/// Which slice of the truncated Fock space to enumerate. At least one of
/// `sector`, `max_total`, `cap` must bound the particle number.
struct BasisSpec {
  std::optional<int> sector;     ///< fixed total particle number
  std::optional<int> max_total;  ///< all sectors 0..max_total
  std::optional<int> cap;        ///< per-site occupation cap
};

/// Occupation-number basis over a region.
///
/// States are stored in descending lexicographic order of their occupation
/// vectors (so (2,0) < (1,1) < (0,2) in ordinal). Slot k of a state is the
/// occupation of region.members()[k].
class FockBasis {
 public:
  static constexpr std::size_t kMaxDimension = 2'000'000;

  FockBasis(Region region, BasisSpec spec);

  const Region& region() const { return region_; }
  const BasisSpec& spec() const { return spec_; }
  std::uint64_t id() const { return id_; }
  std::size_t num_sites() const { return region_.size(); }
  std::size_t dimension() const { return totals_.size(); }

  std::span<const Occupation> state(std::size_t k) const {
    return {occupations_.data() + k * num_sites(), num_sites()};
  }
  int occupation(std::size_t k, std::size_t slot) const {
    return occupations_[k * num_sites() + slot];
  }
  int total(std::size_t k) const { return totals_[k]; }

  /// Largest occupation any single site can carry in this basis.
  int max_occupation() const { return max_occupation_; }

  /// Slot of vertex x in the region, or -1.
  int slot_of(Vertex x) const;

  /// Throws NotInBasis when occ is not a stored state.
  std::size_t index_of(std::span<const Occupation> occ) const;
  std::optional<std::size_t> find(std::span<const Occupation> occ) const;

  /// Distinct total particle numbers present, ascending.
  const std::vector<int>& sectors() const { return sector_list_; }
  /// Ordinals of states with total n (ascending ordinal).
  const std::vector<std::size_t>& sector_indices(int n) const;

  /// True when every sector that can occur under the per-site cap is present,
  /// i.e. the basis is a fixed-sector space or the whole capped space.
  bool is_complete() const;

 private:
  static std::string key_of(std::span<const Occupation> occ) {
    return {reinterpret_cast<const char*>(occ.data()), occ.size()};
  }

  Region region_;
  BasisSpec spec_;
  std::uint64_t id_;
  int max_occupation_ = 0;
  std::vector<Occupation> occupations_;
  std::vector<int> totals_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<int> sector_list_;
  std::vector<std::vector<std::size_t>> sector_members_;  // indexed by total n
};

/// Enumerates the basis. Throws InvalidArgument for an empty region or an
/// unbounded request, ResourceLimit above kMaxDimension. Infeasible
/// (sector, cap) pairs give dimension 0.
FockBasis enumerate_basis(const Region& region, std::optional<int> sector,
                          std::optional<int> cap);
FockBasis enumerate_basis(const Region& region, const BasisSpec& spec);

inline std::size_t dimension(const FockBasis& basis) { return basis.dimension(); }
inline std::size_t index_of(const FockBasis& basis, std::span<const Occupation> occ) {
  return basis.index_of(occ);
}

/// Number of occupation vectors on `sites` sites with total n, each <= cap
/// (cap < 0 means uncapped). Saturates at SIZE_MAX.
std::size_t count_states(std::size_t sites, int n, int cap);

}  // namespace bosonlr
