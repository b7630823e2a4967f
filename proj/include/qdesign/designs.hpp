#pragma once

#include <cstdint>
#include <vector>

#include "qdesign/census.hpp"
#include "qdesign/gf.hpp"
#include "qdesign/ints.hpp"
#include "qdesign/matgroup.hpp"

namespace qdesign::designs {

/// A set of distinct k-subspaces of F_p^d (the candidate block set).
struct BlockSet {
  int d = 0;
  long p = 2;
  int k = 0;
  std::vector<gf::Subspace> blocks;

  static BlockSet from(int d, int k, long p, std::vector<gf::Subspace> blocks);
};

struct VerifyOutcome {
  bool is_design = false;
  Int lambda = 0;  // set when is_design
  // witness pair of t-spaces with differing counts when !is_design
  gf::Subspace witness_a, witness_b;
  Int count_a = 0, count_b = 0;
};

/// Brute-force design check: counts, for every t-subspace of the ambient
/// space, the blocks containing it. Constant count = design with that
/// lambda; otherwise two t-spaces with differing counts are returned.
VerifyOutcome verify_design(const BlockSet& blocks, int t,
                            std::uint64_t budget = 100'000'000);

/// Blockwise perp under the standard dot product; an involution mapping
/// k-sets to (d-k)-sets.
BlockSet dual_blocks(const BlockSet& blocks);
gf::Subspace perp(const gf::Subspace& s);

/// Kramer-Mesner column profile of one block orbit: for each t-orbit of the
/// census, the count c_i of blocks in the orbit containing a fixed
/// t-subspace of that t-orbit. The block orbit is a t-design with parameter
/// lambda iff every c_i equals lambda.
struct KMProfile {
  gf::Subspace block_rep;
  std::uint64_t block_orbit_size = 0;
  std::vector<std::uint64_t> incidences;  // n_i: t-subspaces of the rep per t-orbit
  std::vector<std::uint64_t> counts;      // c_i = block_orbit_size * n_i / |t-orbit i|
};

KMProfile km_profile(const matgroup::MatGroup& g, const gf::Subspace& block_rep,
                     std::uint64_t block_orbit_size, const matgroup::OrbitCensus& t_census);

bool orbit_is_design(const matgroup::MatGroup& g, const gf::Subspace& block_rep,
                     std::uint64_t block_orbit_size, const matgroup::OrbitCensus& t_census,
                     const Int& lambda);

/// Exact backtracking over 0/1 selections of block orbits whose summed
/// profiles hit lambda on every t-orbit. Returns every solution as a sorted
/// list of block-census indices, in deterministic order.
std::vector<std::vector<std::size_t>> km_search(const matgroup::MatGroup& g,
                                                const matgroup::OrbitCensus& block_census,
                                                const matgroup::OrbitCensus& t_census,
                                                const Int& lambda,
                                                std::uint64_t node_budget = 50'000'000);

}  // namespace qdesign::designs
