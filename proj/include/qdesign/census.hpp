#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qdesign/ints.hpp"
#include "qdesign/matgroup.hpp"

namespace qdesign::matgroup {

struct OrbitEntry {
  gf::Subspace rep;    // lex-least member of its orbit
  std::uint64_t size;  // orbit length
};

/// Hash map from packed subspace keys to census entry indices, covering the
/// whole Grassmannian of a complete census. Only available on the packed
/// path (p = 2, k*d <= 64).
class MemberIndex {
 public:
  MemberIndex(std::size_t capacity_hint);
  void insert(std::uint64_t key, std::uint32_t value);
  // returns entry index, or UINT32_MAX when absent
  std::uint32_t lookup(std::uint64_t key) const;
  std::size_t size() const { return count_; }

 private:
  void grow();
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> vals_;
  std::size_t mask_ = 0;
  std::size_t count_ = 0;
};

/// Complete list of group orbits on the k-subspaces of F_p^d. The census is
/// complete exactly when the sizes sum to the Gaussian binomial; that sum is
/// the certificate.
struct OrbitCensus {
  int d = 0, k = 0;
  long p = 2;
  std::string group_id;
  std::uint64_t group_order = 0;  // 0 = unknown
  Int expected_total = 0;
  std::vector<OrbitEntry> entries;  // ascending lex order of reps

  std::shared_ptr<const MemberIndex> members;

  Int certificate() const;
  bool complete() const { return certificate() == expected_total; }
};

enum class CensusStrategy { FullScan, Sampled };

struct CensusOptions {
  CensusStrategy strategy = CensusStrategy::FullScan;
  std::uint64_t seed = 1;
  int parallelism = 1;
  // full-scan refuses Grassmannians larger than this many subspaces
  std::uint64_t scan_budget = 100'000'000;
  double budget_seconds = 0;  // 0 = unlimited
  std::string checkpoint_path;
  std::uint64_t flush_interval = 1024;  // new orbits between checkpoint flushes
  bool build_member_index = false;
  // called under the merger lock as orbits are found
  std::function<void(std::uint64_t orbits_found, const Int& certificate)> progress;
};

/// Complete orbit census. Full-scan walks every subspace; sampled draws
/// random subspaces and stops exactly when the certificate reaches the
/// Gaussian binomial (requires a known group order). The result is
/// independent of seed, strategy and worker count.
OrbitCensus orbit_census(const MatGroup& g, int d, int k, const CensusOptions& opt = {});

/// Continues a sampled census from previously found entries (checkpoint
/// resume); the partial entries are merged by set union.
OrbitCensus orbit_census_resume(const MatGroup& g, const OrbitCensus& partial,
                                const CensusOptions& opt);

/// True when (d, k, p) fits the packed-key fast path.
bool key_packable(int d, int k, long p);

/// Packed key: basis rows as d-bit integers (coordinate j = bit j), row 0 in
/// the most significant block. Ascending key order equals lex order.
std::uint64_t subspace_key(const gf::Subspace& s);
gf::Subspace subspace_from_key(std::uint64_t key, int d, int k);

}  // namespace qdesign::matgroup
