#include "qdesign/census.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "qdesign/census_io.hpp"
#include "qdesign/qarith.hpp"

namespace qdesign::matgroup {

Int OrbitCensus::certificate() const {
  Int sum = 0;
  for (const auto& e : entries) sum += e.size;
  return sum;
}

bool key_packable(int d, int k, long p) {
  return p == 2 && d >= 1 && d <= 16 && k >= 1 && k * d <= 64;
}

namespace {

inline std::uint64_t pack_rows(const std::uint16_t* rows, int k, int d) {
  std::uint64_t key = 0;
  for (int i = 0; i < k; ++i) key = (key << d) | rows[i];
  return key;
}

inline void unpack_rows(std::uint64_t key, std::uint16_t* rows, int k, int d) {
  const std::uint64_t mask = (d == 64) ? ~0ull : ((1ull << d) - 1);
  for (int i = k - 1; i >= 0; --i) {
    rows[i] = static_cast<std::uint16_t>(key & mask);
    key >>= d;
  }
}

inline int rref_bits(std::uint16_t* rows, int k, int d) {
  int r = 0;
  for (int c = 0; c < d && r < k; ++c) {
    const std::uint16_t bit = static_cast<std::uint16_t>(1u << c);
    int piv = -1;
    for (int i = r; i < k; ++i) {
      if (rows[i] & bit) {
        piv = i;
        break;
      }
    }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[r]);
    const std::uint16_t m = rows[r];
    for (int i = 0; i < k; ++i)
      if (i != r && (rows[i] & bit)) rows[i] ^= m;
    ++r;
  }
  return r;
}

// open-addressing set of nonzero uint64 keys (0 is the empty slot)
class KeySet {
 public:
  explicit KeySet(std::size_t cap = 4096) { rehash(cap); }

  void clear() {
    std::fill(slots_.begin(), slots_.end(), 0);
    count_ = 0;
  }

  bool insert(std::uint64_t key) {
    std::size_t i = index(key);
    while (true) {
      const std::uint64_t s = slots_[i];
      if (s == key) return false;
      if (s == 0) {
        slots_[i] = key;
        if (++count_ >= grow_at_) grow();
        return true;
      }
      i = (i + 1) & mask_;
    }
  }

  bool contains(std::uint64_t key) const {
    std::size_t i = index(key);
    while (true) {
      const std::uint64_t s = slots_[i];
      if (s == key) return true;
      if (s == 0) return false;
      i = (i + 1) & mask_;
    }
  }

  std::size_t size() const { return count_; }

  template <class F>
  void for_each(F&& f) const {
    for (std::uint64_t s : slots_)
      if (s != 0) f(s);
  }

 private:
  std::size_t index(std::uint64_t key) const {
    return static_cast<std::size_t>(key * 0x9E3779B97F4A7C15ull) >> shift_;
  }

  void rehash(std::size_t cap) {
    std::size_t n = 16;
    while (n < cap) n <<= 1;
    slots_.assign(n, 0);
    mask_ = n - 1;
    shift_ = 64 - static_cast<unsigned>(std::countr_zero(n));
    grow_at_ = (n * 7) / 10;
    count_ = 0;
  }

  void grow() {
    std::vector<std::uint64_t> old = std::move(slots_);
    const std::size_t cnt = count_;
    rehash(old.size() * 2);
    for (std::uint64_t s : old)
      if (s != 0) insert(s);
    count_ = cnt;
  }

  std::vector<std::uint64_t> slots_;
  std::size_t mask_ = 0, count_ = 0, grow_at_ = 0;
  unsigned shift_ = 0;
};

// one generator with split lookup tables: v * g = lo[v & 255] ^ hi[v >> 8]
struct BitGen {
  std::array<std::uint16_t, 256> lo{}, hi{};
};

struct BitGroup {
  int d = 0, k = 0;
  std::vector<BitGen> gens;

  static BitGroup from(const MatGroup& g, int k) {
    BitGroup out;
    out.d = g.d;
    out.k = k;
    for (const GroupElement& e : g.gens) {
      std::array<std::uint16_t, 16> rows{};
      for (int i = 0; i < g.d; ++i) {
        std::uint16_t r = 0;
        for (int j = 0; j < g.d; ++j)
          if (e.m.at(i, j)) r |= static_cast<std::uint16_t>(1u << j);
        rows[i] = r;
      }
      BitGen t;
      t.lo[0] = 0;
      for (unsigned m = 1; m < 256; ++m)
        t.lo[m] = static_cast<std::uint16_t>(t.lo[m & (m - 1)] ^ rows[std::countr_zero(m)]);
      t.hi[0] = 0;
      for (unsigned m = 1; m < 256; ++m) {
        const unsigned j = 8 + static_cast<unsigned>(std::countr_zero(m));
        t.hi[m] = static_cast<std::uint16_t>(t.hi[m & (m - 1)] ^ (j < 16 ? rows[j] : 0));
      }
      out.gens.push_back(t);
    }
    return out;
  }
};

enum class BfsResult { Completed, BelowStart, KnownOrbit };

// closure of start under the generators; optionally aborts as soon as a key
// below start (start cannot be the rep) or a key in `known` (orbit already
// recorded) shows up
BfsResult bfs_orbit(std::uint64_t start, const BitGroup& g, KeySet& visited,
                    std::vector<std::uint64_t>& stack, const KeySet* known,
                    bool abort_below_start, std::uint64_t& out_min, std::uint64_t& out_size) {
  visited.clear();
  stack.clear();
  visited.insert(start);
  if (known && known->contains(start)) return BfsResult::KnownOrbit;
  stack.push_back(start);
  std::uint64_t best = start;
  std::uint16_t rows[16], img[16];
  const int k = g.k, d = g.d;
  while (!stack.empty()) {
    const std::uint64_t u = stack.back();
    stack.pop_back();
    unpack_rows(u, rows, k, d);
    for (const BitGen& gen : g.gens) {
      for (int i = 0; i < k; ++i)
        img[i] = static_cast<std::uint16_t>(gen.lo[rows[i] & 0xff] ^ gen.hi[rows[i] >> 8]);
      rref_bits(img, k, d);
      const std::uint64_t v = pack_rows(img, k, d);
      if (!visited.insert(v)) continue;
      if (abort_below_start && v < start) return BfsResult::BelowStart;
      if (known && known->contains(v)) return BfsResult::KnownOrbit;
      if (v < best) best = v;
      stack.push_back(v);
    }
  }
  out_min = best;
  out_size = visited.size();
  return BfsResult::Completed;
}

// every RREF basis key of a k-subspace of F_2^d, one call per subspace
template <class F>
void for_each_rref_key(int d, int k, F&& f) {
  std::vector<int> piv(k);
  for (int i = 0; i < k; ++i) piv[i] = i;
  std::uint16_t rows[16];
  while (true) {
    std::vector<std::pair<int, int>> cells;  // (row, col) free positions
    {
      std::uint16_t pivmask = 0;
      for (int c : piv) pivmask |= static_cast<std::uint16_t>(1u << c);
      for (int i = 0; i < k; ++i) {
        rows[i] = static_cast<std::uint16_t>(1u << piv[i]);
        for (int j = piv[i] + 1; j < d; ++j)
          if (!(pivmask & (1u << j))) cells.emplace_back(i, j);
      }
    }
    std::vector<std::uint8_t> vals(cells.size(), 0);
    while (true) {
      f(pack_rows(rows, k, d));
      std::size_t c = 0;
      while (c < vals.size() && vals[c] == 1) {
        vals[c] = 0;
        rows[cells[c].first] ^= static_cast<std::uint16_t>(1u << cells[c].second);
        ++c;
      }
      if (c == vals.size()) break;
      vals[c] = 1;
      rows[cells[c].first] ^= static_cast<std::uint16_t>(1u << cells[c].second);
    }
    int i = k - 1;
    while (i >= 0 && piv[i] == d - k + i) --i;
    if (i < 0) break;
    ++piv[i];
    for (int j = i + 1; j < k; ++j) piv[j] = piv[j - 1] + 1;
  }
}

struct PendingCensus {
  const MatGroup* group;
  int d, k;
  Int expected;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> found;  // (rep key, size)
};

OrbitCensus finish_census(const PendingCensus& pc, bool build_member_index) {
  OrbitCensus out;
  out.d = pc.d;
  out.k = pc.k;
  out.p = pc.group->p;
  out.group_id = pc.group->id;
  out.group_order = pc.group->order.value_or(0);
  out.expected_total = pc.expected;
  auto found = pc.found;
  std::sort(found.begin(), found.end());
  out.entries.reserve(found.size());
  for (const auto& [key, size] : found)
    out.entries.push_back({subspace_from_key(key, pc.d, pc.k), size});

  if (build_member_index && out.complete() && key_packable(pc.d, pc.k, out.p)) {
    if (out.expected_total > Int(1) << 31)
      throw std::invalid_argument("member index limited to 2^31 subspaces");
    auto idx = std::make_shared<MemberIndex>(
        out.expected_total.convert_to<std::size_t>());
    BitGroup bg = BitGroup::from(*pc.group, pc.k);
    KeySet visited(4096);
    std::vector<std::uint64_t> stack;
    for (std::uint32_t i = 0; i < found.size(); ++i) {
      std::uint64_t mn = 0, sz = 0;
      bfs_orbit(found[i].first, bg, visited, stack, nullptr, false, mn, sz);
      if (sz != found[i].second || mn != found[i].first)
        throw std::logic_error("census entry fails re-verification");
      visited.for_each([&](std::uint64_t key) { idx->insert(key, i); });
    }
    out.members = std::move(idx);
  }
  return out;
}

void write_checkpoint(const std::string& path, const PendingCensus& pc) {
  if (path.empty()) return;
  OrbitCensus snap = finish_census(pc, false);
  const std::string tmp = path + ".tmp";
  io::write_census(tmp, snap);
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw CheckpointError("cannot replace checkpoint file " + path);
}

OrbitCensus census_full_scan_packed(const MatGroup& g, int d, int k, const CensusOptions& opt) {
  PendingCensus pc{&g, d, k, qarith::gaussian_binomial(d, k, Int(2)), {}};
  if (pc.expected > Int(opt.scan_budget))
    throw BudgetExceeded("full scan over " + pc.expected.str() +
                             " subspaces exceeds the iteration budget",
                         opt.scan_budget);
  BitGroup bg = BitGroup::from(g, k);
  KeySet visited(4096);
  std::vector<std::uint64_t> stack;
  for_each_rref_key(d, k, [&](std::uint64_t start) {
    std::uint64_t mn = 0, sz = 0;
    if (bfs_orbit(start, bg, visited, stack, nullptr, true, mn, sz) == BfsResult::Completed)
      pc.found.emplace_back(start, sz);  // nothing below start, so start is the rep
  });
  OrbitCensus out = finish_census(pc, opt.build_member_index);
  if (!out.complete()) throw std::logic_error("full scan produced an incomplete census");
  if (!opt.checkpoint_path.empty()) write_checkpoint(opt.checkpoint_path, pc);
  return out;
}

OrbitCensus census_sampled_packed(const MatGroup& g, int d, int k, const CensusOptions& opt,
                                  const std::vector<OrbitEntry>* preload) {
  if (!g.order) throw std::invalid_argument("sampled census requires a known group order");
  PendingCensus pc{&g, d, k, qarith::gaussian_binomial(d, k, Int(2)), {}};

  std::mutex mu;
  KeySet reps(1 << 12);
  Int cert = 0;
  std::uint64_t since_flush = 0;
  std::atomic<bool> done{false};
  std::atomic<bool> out_of_time{false};
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  if (preload) {
    for (const OrbitEntry& e : *preload) {
      const std::uint64_t key = subspace_key(e.rep);
      if (reps.insert(key)) {
        pc.found.emplace_back(key, e.size);
        cert += e.size;
      }
    }
    if (cert == pc.expected) done = true;
  }

  BitGroup bg = BitGroup::from(g, k);
  const int workers = std::max(1, opt.parallelism);
  std::exception_ptr failure;

  auto worker = [&](int wid) {
    std::mt19937_64 rng(opt.seed * 0x9E3779B97F4A7C15ull + 0x243F6A8885A308D3ull +
                        static_cast<std::uint64_t>(wid));
    KeySet local_known(1 << 12), visited(4096);
    std::vector<std::uint64_t> stack;
    std::size_t log_pos = 0;
    const std::uint64_t dmask = (1ull << d) - 1;
    std::uint16_t rows[16];
    while (!done.load(std::memory_order_relaxed)) {
      if (opt.budget_seconds > 0 && elapsed() > opt.budget_seconds) {
        out_of_time = true;
        done = true;
        break;
      }
      {
        std::lock_guard<std::mutex> lock(mu);
        for (; log_pos < pc.found.size(); ++log_pos) local_known.insert(pc.found[log_pos].first);
      }
      // uniform full-rank draw, canonicalized
      std::uint64_t start;
      while (true) {
        for (int i = 0; i < k; ++i) rows[i] = static_cast<std::uint16_t>(rng() & dmask);
        if (rref_bits(rows, k, d) == k) {
          start = pack_rows(rows, k, d);
          break;
        }
      }
      std::uint64_t mn = 0, sz = 0;
      if (bfs_orbit(start, bg, visited, stack, &local_known, false, mn, sz) !=
          BfsResult::Completed)
        continue;
      std::lock_guard<std::mutex> lock(mu);
      if (failure) break;
      if (!reps.insert(mn)) continue;
      pc.found.emplace_back(mn, sz);
      cert += sz;
      if (opt.progress) opt.progress(pc.found.size(), cert);
      if (++since_flush >= opt.flush_interval && !opt.checkpoint_path.empty()) {
        write_checkpoint(opt.checkpoint_path, pc);
        since_flush = 0;
      }
      if (cert == pc.expected) done = true;
      if (cert > pc.expected) {
        failure = std::make_exception_ptr(
            std::logic_error("certificate overshot the Grassmannian size"));
        done = true;
      }
    }
  };

  auto run_worker = [&](int wid) {
    try {
      worker(wid);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
      done = true;
    }
  };

  if (workers == 1) {
    run_worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_worker, w);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  if (out_of_time) {
    write_checkpoint(opt.checkpoint_path, pc);
    throw BudgetExceeded("sampled census ran out of time with " +
                             std::to_string(pc.found.size()) + " orbits found",
                         static_cast<std::uint64_t>(opt.budget_seconds));
  }
  OrbitCensus out = finish_census(pc, opt.build_member_index);
  if (!opt.checkpoint_path.empty()) write_checkpoint(opt.checkpoint_path, pc);
  return out;
}

// fallback for fields/shapes outside the packed engine; desk scale only
OrbitCensus census_generic(const MatGroup& g, int d, int k, const CensusOptions& opt) {
  PendingCensus dummy{&g, d, k, qarith::gaussian_binomial(d, k, Int(g.p)), {}};
  OrbitCensus out;
  out.d = d;
  out.k = k;
  out.p = g.p;
  out.group_id = g.id;
  out.group_order = g.order.value_or(0);
  out.expected_total = dummy.expected;

  if (opt.strategy == CensusStrategy::FullScan) {
    if (out.expected_total > Int(opt.scan_budget))
      throw BudgetExceeded("full scan exceeds the iteration budget", opt.scan_budget);
    std::unordered_set<gf::Subspace, gf::SubspaceHash> seen;
    for (const gf::Subspace& s : gf::enumerate_subspaces(d, k, g.p)) {
      if (seen.contains(s)) continue;
      std::vector<gf::Subspace> orb = orbit(g, s);
      const gf::Subspace* mn = &s;
      for (const gf::Subspace& x : orb) {
        if (gf::lex_compare(x, *mn) < 0) mn = &x;
      }
      out.entries.push_back({*mn, orb.size()});
      for (gf::Subspace& x : orb) seen.insert(std::move(x));
    }
  } else {
    if (!g.order) throw std::invalid_argument("sampled census requires a known group order");
    std::mt19937_64 rng(opt.seed);
    std::unordered_set<gf::Subspace, gf::SubspaceHash> reps;
    Int cert = 0;
    while (cert < out.expected_total) {
      gf::Subspace s = gf::random_subspace(d, k, g.p, rng);
      auto [mn, sz] = orbit_min(g, s);
      if (reps.insert(mn).second) {
        out.entries.push_back({std::move(mn), sz});
        cert += sz;
      }
    }
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const OrbitEntry& a, const OrbitEntry& b) {
              return gf::lex_compare(a.rep, b.rep) < 0;
            });
  if (!out.complete()) throw std::logic_error("census incomplete");
  return out;
}

}  // namespace

MemberIndex::MemberIndex(std::size_t capacity_hint) {
  std::size_t n = 16;
  while (n < capacity_hint * 2) n <<= 1;
  keys_.assign(n, 0);
  vals_.assign(n, 0);
  mask_ = n - 1;
}

void MemberIndex::insert(std::uint64_t key, std::uint32_t value) {
  std::size_t i = static_cast<std::size_t>(key * 0x9E3779B97F4A7C15ull) & mask_;
  while (true) {
    if (keys_[i] == 0) {
      keys_[i] = key;
      vals_[i] = value;
      ++count_;
      if (count_ * 10 >= keys_.size() * 9) grow();
      return;
    }
    if (keys_[i] == key) {
      vals_[i] = value;
      return;
    }
    i = (i + 1) & mask_;
  }
}

std::uint32_t MemberIndex::lookup(std::uint64_t key) const {
  std::size_t i = static_cast<std::size_t>(key * 0x9E3779B97F4A7C15ull) & mask_;
  while (true) {
    if (keys_[i] == key) return vals_[i];
    if (keys_[i] == 0) return UINT32_MAX;
    i = (i + 1) & mask_;
  }
}

void MemberIndex::grow() {
  std::vector<std::uint64_t> ok = std::move(keys_);
  std::vector<std::uint32_t> ov = std::move(vals_);
  keys_.assign(ok.size() * 2, 0);
  vals_.assign(ok.size() * 2, 0);
  mask_ = keys_.size() - 1;
  count_ = 0;
  for (std::size_t i = 0; i < ok.size(); ++i)
    if (ok[i] != 0) insert(ok[i], ov[i]);
}

std::uint64_t subspace_key(const gf::Subspace& s) {
  if (!key_packable(s.d, s.k, s.p)) throw std::invalid_argument("subspace not packable");
  std::uint16_t rows[16];
  for (int i = 0; i < s.k; ++i) {
    std::uint16_t r = 0;
    for (int j = 0; j < s.d; ++j)
      if (s.basis.at(i, j)) r |= static_cast<std::uint16_t>(1u << j);
    rows[i] = r;
  }
  return pack_rows(rows, s.k, s.d);
}

gf::Subspace subspace_from_key(std::uint64_t key, int d, int k) {
  std::uint16_t rows[16];
  unpack_rows(key, rows, k, d);
  gf::Mat m = gf::Mat::zero(k, d, 2);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j) m.at(i, j) = (rows[i] >> j) & 1;
  gf::Subspace s = gf::subspace_from_rows(m);
  if (s.k != k || s.basis != m) throw std::logic_error("key does not encode a canonical basis");
  return s;
}

OrbitCensus orbit_census(const MatGroup& g, int d, int k, const CensusOptions& opt) {
  if (g.d != d) throw AmbientMismatch("orbit_census: group dimension mismatch");
  if (k < 0 || k > d) throw std::invalid_argument("orbit_census needs 0 <= k <= d");
  if (k == 0 || k == d) {
    OrbitCensus out;
    out.d = d;
    out.k = k;
    out.p = g.p;
    out.group_id = g.id;
    out.group_order = g.order.value_or(0);
    out.expected_total = 1;
    out.entries.push_back({k == 0 ? gf::zero_subspace(d, g.p) : gf::full_space(d, g.p), 1});
    return out;
  }
  if (key_packable(d, k, g.p)) {
    if (opt.strategy == CensusStrategy::FullScan) return census_full_scan_packed(g, d, k, opt);
    return census_sampled_packed(g, d, k, opt, nullptr);
  }
  return census_generic(g, d, k, opt);
}

OrbitCensus orbit_census_resume(const MatGroup& g, const OrbitCensus& partial,
                                const CensusOptions& opt) {
  if (partial.group_id != g.id || partial.d != g.d || partial.p != g.p)
    throw CheckpointError("checkpoint belongs to a different census");
  if (!key_packable(partial.d, partial.k, partial.p))
    throw std::invalid_argument("resume is only supported on the packed path");
  if (partial.complete()) {
    OrbitCensus out = partial;
    if (opt.build_member_index && !out.members) {
      PendingCensus pc{&g, partial.d, partial.k, partial.expected_total, {}};
      for (const OrbitEntry& e : partial.entries)
        pc.found.emplace_back(subspace_key(e.rep), e.size);
      return finish_census(pc, true);
    }
    return out;
  }
  return census_sampled_packed(g, partial.d, partial.k, opt, &partial.entries);
}

}  // namespace qdesign::matgroup
