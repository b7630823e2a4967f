#include "qdesign/designs.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "qdesign/qarith.hpp"

namespace qdesign::designs {

BlockSet BlockSet::from(int d, int k, long p, std::vector<gf::Subspace> blocks) {
  std::unordered_set<gf::Subspace, gf::SubspaceHash> seen;
  for (const gf::Subspace& b : blocks) {
    if (b.d != d || b.p != p || b.k != k)
      throw AmbientMismatch("block set: shape mismatch among blocks");
    if (!seen.insert(b).second) throw std::invalid_argument("block set has duplicate blocks");
  }
  return BlockSet{d, p, k, std::move(blocks)};
}

VerifyOutcome verify_design(const BlockSet& blocks, int t, std::uint64_t budget) {
  if (t >= blocks.k && !blocks.blocks.empty())
    throw std::invalid_argument("verify_design needs t < k");
  const Int total = qarith::gaussian_binomial(blocks.d, t, Int(blocks.p));
  if (total > Int(budget))
    throw BudgetExceeded("t-subspace enumeration exceeds the budget", budget);

  std::unordered_map<gf::Subspace, Int, gf::SubspaceHash> counts;
  for (const gf::Subspace& b : blocks.blocks)
    for (gf::Subspace& ts : gf::subspaces_of(b, t)) ++counts[std::move(ts)];

  VerifyOutcome out;
  if (counts.empty()) {
    // empty block set: vacuously constant at zero
    out.is_design = true;
    out.lambda = 0;
    return out;
  }
  auto it = counts.begin();
  const gf::Subspace* first = &it->first;
  const Int lambda = it->second;
  for (++it; it != counts.end(); ++it) {
    if (it->second != lambda) {
      out.is_design = false;
      out.witness_a = *first;
      out.count_a = lambda;
      out.witness_b = it->first;
      out.count_b = it->second;
      return out;
    }
  }
  if (Int(counts.size()) != total) {
    // some t-space lies in no block: dig one up as the witness
    for (const gf::Subspace& ts : gf::enumerate_subspaces(blocks.d, t, blocks.p)) {
      if (!counts.contains(ts)) {
        out.is_design = false;
        out.witness_a = *first;
        out.count_a = lambda;
        out.witness_b = ts;
        out.count_b = 0;
        return out;
      }
    }
    throw std::logic_error("tally disagrees with the Grassmannian size");
  }
  out.is_design = true;
  out.lambda = lambda;
  return out;
}

gf::Subspace perp(const gf::Subspace& s) {
  // kernel of the basis map, read off the RREF structure
  const int d = s.d, k = s.k;
  const long p = s.p;
  std::vector<int> piv(k);
  std::vector<bool> is_piv(d, false);
  for (int i = 0; i < k; ++i) {
    int c = 0;
    while (c < d && s.basis.at(i, c) == 0) ++c;
    piv[i] = c;
    is_piv[c] = true;
  }
  gf::Mat ker = gf::Mat::zero(d - k, d, p);
  int r = 0;
  for (int f = 0; f < d; ++f) {
    if (is_piv[f]) continue;
    ker.at(r, f) = 1;
    for (int i = 0; i < k; ++i) {
      int v = (-static_cast<int>(s.basis.at(i, f))) % static_cast<int>(p);
      if (v < 0) v += static_cast<int>(p);
      ker.at(r, piv[i]) = static_cast<std::uint8_t>(v);
    }
    ++r;
  }
  return gf::subspace_from_rows(ker);
}

BlockSet dual_blocks(const BlockSet& blocks) {
  std::vector<gf::Subspace> out;
  out.reserve(blocks.blocks.size());
  for (const gf::Subspace& b : blocks.blocks) out.push_back(perp(b));
  return BlockSet::from(blocks.d, blocks.d - blocks.k, blocks.p, std::move(out));
}

namespace {

std::size_t resolve_t_orbit(const matgroup::MatGroup& g, const matgroup::OrbitCensus& t_census,
                            const gf::Subspace& ts) {
  if (t_census.members) {
    const std::uint32_t idx = t_census.members->lookup(matgroup::subspace_key(ts));
    if (idx == UINT32_MAX) throw std::logic_error("t-subspace missing from the member index");
    return idx;
  }
  auto [rep, size] = matgroup::orbit_min(g, ts);
  (void)size;
  // entries ascend in lex order, so the rep is found by binary search
  auto it = std::lower_bound(t_census.entries.begin(), t_census.entries.end(), rep,
                             [](const matgroup::OrbitEntry& e, const gf::Subspace& key) {
                               return gf::lex_compare(e.rep, key) < 0;
                             });
  if (it == t_census.entries.end() || !(it->rep == rep))
    throw std::logic_error("orbit representative missing from the census");
  return static_cast<std::size_t>(it - t_census.entries.begin());
}

}  // namespace

KMProfile km_profile(const matgroup::MatGroup& g, const gf::Subspace& block_rep,
                     std::uint64_t block_orbit_size, const matgroup::OrbitCensus& t_census) {
  if (t_census.d != block_rep.d || t_census.p != block_rep.p)
    throw AmbientMismatch("km_profile: ambient mismatch");
  if (t_census.group_id != g.id)
    throw IncompleteCensus("km_profile: census computed under a different group");
  if (!t_census.complete()) throw IncompleteCensus("km_profile: t-census is incomplete");

  KMProfile prof;
  prof.block_rep = block_rep;
  prof.block_orbit_size = block_orbit_size;
  prof.incidences.assign(t_census.entries.size(), 0);
  prof.counts.assign(t_census.entries.size(), 0);

  for (const gf::Subspace& ts : gf::subspaces_of(block_rep, t_census.k))
    ++prof.incidences[resolve_t_orbit(g, t_census, ts)];

  for (std::size_t i = 0; i < prof.incidences.size(); ++i) {
    const std::uint64_t n = prof.incidences[i];
    if (n == 0) continue;
    const std::uint64_t tsize = t_census.entries[i].size;
    const std::uint64_t num = block_orbit_size * n;
    if (num % tsize != 0)
      throw std::logic_error("orbit counting identity violated; inputs inconsistent");
    prof.counts[i] = num / tsize;
  }
  return prof;
}

bool orbit_is_design(const matgroup::MatGroup& g, const gf::Subspace& block_rep,
                     std::uint64_t block_orbit_size, const matgroup::OrbitCensus& t_census,
                     const Int& lambda) {
  const KMProfile prof = km_profile(g, block_rep, block_orbit_size, t_census);
  for (std::uint64_t c : prof.counts)
    if (Int(c) != lambda) return false;
  return true;
}

std::vector<std::vector<std::size_t>> km_search(const matgroup::MatGroup& g,
                                                const matgroup::OrbitCensus& block_census,
                                                const matgroup::OrbitCensus& t_census,
                                                const Int& lambda,
                                                std::uint64_t node_budget) {
  if (!block_census.complete() || !t_census.complete())
    throw IncompleteCensus("km_search needs complete censuses");
  if (block_census.group_id != t_census.group_id)
    throw IncompleteCensus("km_search: censuses from different groups");
  if (lambda < 0 || lambda > Int(UINT64_MAX >> 1))
    throw std::invalid_argument("lambda out of range");
  const std::uint64_t target = lambda.convert_to<std::uint64_t>();

  const std::size_t rows = block_census.entries.size();
  const std::size_t cols = t_census.entries.size();
  std::vector<std::vector<std::uint64_t>> profile(rows);
  for (std::size_t r = 0; r < rows; ++r)
    profile[r] = km_profile(g, block_census.entries[r].rep, block_census.entries[r].size,
                            t_census)
                     .counts;

  // how much each column can still gain from rows >= r
  std::vector<std::vector<std::uint64_t>> tail(rows + 1, std::vector<std::uint64_t>(cols, 0));
  for (std::size_t r = rows; r-- > 0;)
    for (std::size_t c = 0; c < cols; ++c) tail[r][c] = tail[r + 1][c] + profile[r][c];

  std::vector<std::vector<std::size_t>> solutions;
  std::vector<std::size_t> chosen;
  std::vector<std::uint64_t> sums(cols, 0);
  std::uint64_t nodes = 0;

  auto feasible = [&](std::size_t r) {
    for (std::size_t c = 0; c < cols; ++c)
      if (sums[c] + tail[r][c] < target) return false;
    return true;
  };

  auto rec = [&](auto&& self, std::size_t r) -> void {
    if (++nodes > node_budget) throw BudgetExceeded("km_search node budget", node_budget);
    if (r == rows) {
      for (std::size_t c = 0; c < cols; ++c)
        if (sums[c] != target) return;
      solutions.push_back(chosen);
      return;
    }
    if (!feasible(r)) return;
    // include row r
    bool ok = true;
    for (std::size_t c = 0; c < cols; ++c)
      if (sums[c] + profile[r][c] > target) {
        ok = false;
        break;
      }
    if (ok) {
      for (std::size_t c = 0; c < cols; ++c) sums[c] += profile[r][c];
      chosen.push_back(r);
      self(self, r + 1);
      chosen.pop_back();
      for (std::size_t c = 0; c < cols; ++c) sums[c] -= profile[r][c];
    }
    // skip row r
    self(self, r + 1);
  };
  rec(rec, 0);
  return solutions;
}

}  // namespace qdesign::designs
