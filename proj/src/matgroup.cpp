#include "qdesign/matgroup.hpp"

#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "qdesign/ints.hpp"
#include "qdesign/qarith.hpp"

namespace qdesign::matgroup {

GroupElement GroupElement::from(gf::Mat m) {
  if (m.rows != m.cols) throw std::invalid_argument("group element must be square");
  if (gf::rank(m) != m.rows) throw std::invalid_argument("group element must be invertible");
  return GroupElement{std::move(m)};
}

GroupElement operator*(const GroupElement& x, const GroupElement& y) {
  return GroupElement{gf::mul(x.m, y.m)};
}

GroupElement inverse(const GroupElement& g) {
  auto inv = gf::inverse(g.m);
  if (!inv) throw std::logic_error("group element not invertible");
  return GroupElement{std::move(*inv)};
}

MatGroup trivial_group(int d, long p) {
  MatGroup g;
  g.d = d;
  g.p = p;
  g.id = "trivial:d=" + std::to_string(d) + ",p=" + std::to_string(p);
  g.order = 1;
  return g;
}

MatGroup group_from_generators(std::string id, std::vector<GroupElement> gens,
                               std::optional<std::uint64_t> order) {
  if (gens.empty()) throw std::invalid_argument("need at least one generator");
  MatGroup g;
  g.d = gens.front().dim();
  g.p = gens.front().p();
  for (const auto& e : gens)
    if (e.dim() != g.d || e.p() != g.p) throw AmbientMismatch("generator shape mismatch");
  g.id = std::move(id);
  g.gens = std::move(gens);
  g.order = order;
  return g;
}

gf::Subspace act(const gf::Subspace& s, const GroupElement& g) {
  if (s.d != g.dim() || s.p != g.p()) throw AmbientMismatch("act: ambient mismatch");
  return gf::subspace_from_rows(gf::mul(s.basis, g.m));
}

std::uint64_t element_order(const GroupElement& g) {
  const gf::Mat id = gf::Mat::identity(g.dim(), g.p());
  gf::Mat acc = g.m;
  std::uint64_t n = 1;
  // every order arising here is small; the cap only guards against misuse
  constexpr std::uint64_t kCap = 1ull << 26;
  while (acc != id) {
    acc = gf::mul(acc, g.m);
    if (++n > kCap) throw std::runtime_error("element_order: order exceeds cap");
  }
  return n;
}

namespace {

void check_poly(long p, int d, const Poly& poly) {
  if (static_cast<int>(poly.size()) != d + 1 || poly[d] != 1)
    throw std::invalid_argument("polynomial must be monic of degree d");
  for (int c : poly)
    if (c < 0 || c >= p) throw std::invalid_argument("polynomial coefficients must be reduced mod p");
}

// c = a*b mod (poly, p); all coefficient vectors of size d
std::vector<int> polymul_mod(const std::vector<int>& a, const std::vector<int>& b, const Poly& poly,
                             long p, int d) {
  std::vector<int> prod(2 * d - 1, 0);
  for (int i = 0; i < d; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < d; ++j) prod[i + j] = static_cast<int>((prod[i + j] + a[i] * b[j]) % p);
  }
  for (int i = 2 * d - 2; i >= d; --i) {
    const int f = prod[i];
    if (f == 0) continue;
    prod[i] = 0;
    for (int j = 0; j < d; ++j) {
      int v = prod[i - d + j] - f * poly[j];
      v %= static_cast<int>(p);
      if (v < 0) v += static_cast<int>(p);
      prod[i - d + j] = v;
    }
  }
  prod.resize(d);
  return prod;
}

std::uint64_t pd_minus_one(long p, int d) {
  std::uint64_t v = 1;
  for (int i = 0; i < d; ++i) v *= static_cast<std::uint64_t>(p);
  return v - 1;
}

}  // namespace

GroupElement singer_element(long p, int d, const Poly& poly) {
  check_poly(p, d, poly);
  gf::Mat m = gf::Mat::zero(d, d, p);
  for (int i = 0; i + 1 < d; ++i) m.at(i, i + 1) = 1;
  for (int j = 0; j < d; ++j) {
    int v = (-poly[j]) % static_cast<int>(p);
    if (v < 0) v += static_cast<int>(p);
    m.at(d - 1, j) = static_cast<std::uint8_t>(v);
  }
  GroupElement g = GroupElement::from(std::move(m));
  const std::uint64_t want = pd_minus_one(p, d);
  const gf::Mat id = gf::Mat::identity(d, p);
  gf::Mat acc = g.m;
  for (std::uint64_t n = 1; n < want; ++n) {
    if (acc == id) throw NotPrimitive("polynomial is not primitive: order " + std::to_string(n));
    acc = gf::mul(acc, g.m);
  }
  if (acc != id) throw NotPrimitive("polynomial is not primitive: order exceeds p^d - 1");
  return g;
}

GroupElement frobenius_element(long p, int d, const Poly& poly) {
  check_poly(p, d, poly);
  if (d == 1) return GroupElement{gf::Mat::identity(1, p)};  // x -> x^p fixes F_p
  // u = x^p mod poly
  std::vector<int> u(d, 0);
  if (p < d) {
    u[static_cast<std::size_t>(p)] = 1;
  } else {
    std::vector<int> base(d, 0);
    base[1] = 1;
    u[0] = 1;
    long e = p;
    while (e) {
      if (e & 1) u = polymul_mod(u, base, poly, p, d);
      base = polymul_mod(base, base, poly, p, d);
      e >>= 1;
    }
  }
  // row i = coordinates of (x^i)^p = u^i
  gf::Mat m = gf::Mat::zero(d, d, p);
  std::vector<int> w(d, 0);
  w[0] = 1;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m.at(i, j) = static_cast<std::uint8_t>(w[j]);
    w = polymul_mod(w, u, poly, p, d);
  }
  return GroupElement::from(std::move(m));
}

namespace {

std::string poly_hex(long p, const Poly& poly) {
  unsigned long long v = 0;
  for (int i = static_cast<int>(poly.size()) - 1; i >= 0; --i)
    v = v * static_cast<unsigned long long>(p) + static_cast<unsigned long long>(poly[i]);
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

MatGroup gamma_l1(long p, int d, const Poly& poly) {
  GroupElement s = singer_element(p, d, poly);
  GroupElement f = frobenius_element(p, d, poly);
  std::ostringstream id;
  id << "gamma-l1:p=" << p << ",d=" << d << ",poly=" << poly_hex(p, poly);
  const std::uint64_t order = static_cast<std::uint64_t>(d) * pd_minus_one(p, d);
  return group_from_generators(id.str(), {std::move(s), std::move(f)}, order);
}

MatGroup gamma_l1(long p, int d) { return gamma_l1(p, d, default_primitive_poly(p, d)); }

Poly default_primitive_poly(long p, int d) {
  // coefficient list c[0..d]; entries below are order-verified when used
  auto bits = [d](std::initializer_list<int> exps) {
    Poly poly(d + 1, 0);
    for (int e : exps) poly[e] = 1;
    return poly;
  };
  if (p == 2) {
    switch (d) {
      case 1: return bits({0, 1});
      case 2: return bits({0, 1, 2});
      case 3: return bits({0, 1, 3});
      case 4: return bits({0, 1, 4});
      case 5: return bits({0, 2, 5});
      case 6: return bits({0, 1, 6});
      case 7: return bits({0, 1, 7});
      case 8: return bits({0, 2, 3, 4, 8});
      case 9: return bits({0, 4, 9});
      case 10: return bits({0, 3, 10});
      case 11: return bits({0, 2, 11});
      case 12: return bits({0, 1, 4, 6, 12});
      case 13: return bits({0, 1, 3, 4, 13});
      case 14: return bits({0, 1, 6, 10, 14});
      case 15: return bits({0, 1, 15});
      case 16: return bits({0, 1, 3, 12, 16});
      default: break;
    }
  }
  if (p == 3) {
    switch (d) {
      case 1: return {1, 1};        // x + 1; order 2
      case 2: return {2, 1, 1};     // x^2 + x + 2
      case 3: return {1, 2, 0, 1};  // x^3 + 2x + 1
      default: break;
    }
  }
  if (p == 5 && d == 2) return {2, 1, 1};  // x^2 + x + 2
  throw std::out_of_range("no default primitive polynomial recorded for p=" + std::to_string(p) +
                          ", d=" + std::to_string(d));
}

std::vector<GroupElement> sl_generators(int m, long p) {
  if (m < 2) throw std::invalid_argument("sl_generators needs m >= 2");
  gf::Mat t = gf::Mat::identity(m, p);
  t.at(0, 1) = 1;
  gf::Mat c = gf::Mat::zero(m, m, p);
  for (int i = 0; i + 1 < m; ++i) c.at(i, i + 1) = 1;
  // sign fix keeps the determinant 1
  c.at(m - 1, 0) = static_cast<std::uint8_t>((m % 2 == 1) ? 1 : (p - 1) % p);
  auto a = GroupElement::from(std::move(t));
  auto b = GroupElement::from(std::move(c));
  return {std::move(a), std::move(b)};
}

std::pair<MatGroup, MatGroup> hyperplane_levi(int dd, long p) {
  if (dd < 3) throw std::invalid_argument("hyperplane_levi needs dd >= 3");
  std::vector<GroupElement> kgens;
  for (const GroupElement& x : sl_generators(dd - 1, p)) {
    gf::Mat m = gf::Mat::zero(dd, dd, p);
    m.at(0, 0) = 1;
    for (int i = 0; i < dd - 1; ++i)
      for (int j = 0; j < dd - 1; ++j) m.at(i + 1, j + 1) = x.m.at(i, j);
    kgens.push_back(GroupElement::from(std::move(m)));
  }

  Int sl_order_big = qarith::gl_order(dd - 1, Int(p)) / (p - 1);
  std::optional<std::uint64_t> korder, horder;
  if (sl_order_big <= Int(UINT64_MAX / 2)) {
    korder = sl_order_big.convert_to<std::uint64_t>();
    Int h = sl_order_big * ipow(Int(p), static_cast<unsigned>(dd - 1));
    if (h <= Int(UINT64_MAX / 2)) horder = h.convert_to<std::uint64_t>();
  }

  std::string suffix = "dd=" + std::to_string(dd) + ",p=" + std::to_string(p);
  MatGroup k = group_from_generators("hyperplane-levi:K," + suffix, kgens, korder);

  gf::Mat eta = gf::Mat::identity(dd, p);
  eta.at(0, 1) = 1;
  std::vector<GroupElement> hgens = kgens;
  hgens.push_back(GroupElement::from(std::move(eta)));
  MatGroup h = group_from_generators("hyperplane-levi:H," + suffix, std::move(hgens), horder);
  return {std::move(k), std::move(h)};
}

std::vector<gf::Subspace> orbit(const MatGroup& g, const gf::Subspace& s, std::uint64_t budget) {
  if (s.d != g.d || s.p != g.p) throw AmbientMismatch("orbit: ambient mismatch");
  std::unordered_set<gf::Subspace, gf::SubspaceHash> seen{s};
  std::vector<gf::Subspace> frontier{s};
  while (!frontier.empty()) {
    gf::Subspace u = std::move(frontier.back());
    frontier.pop_back();
    for (const GroupElement& gen : g.gens) {
      gf::Subspace v = act(u, gen);
      if (seen.contains(v)) continue;
      if (seen.size() >= budget) throw OrbitBudgetExceeded("orbit budget exceeded", budget);
      frontier.push_back(v);
      seen.insert(std::move(v));
    }
  }
  return {seen.begin(), seen.end()};
}

std::pair<gf::Subspace, std::uint64_t> orbit_min(const MatGroup& g, const gf::Subspace& s,
                                                 std::uint64_t budget) {
  std::vector<gf::Subspace> orb = orbit(g, s, budget);
  const gf::Subspace* best = &orb.front();
  for (const gf::Subspace& x : orb)
    if (gf::lex_compare(x, *best) < 0) best = &x;
  return {*best, orb.size()};
}

const std::vector<GroupElement>& enumerate_elements(MatGroup& g, std::uint64_t budget) {
  if (g.elements) return *g.elements;
  auto key_of = [](const gf::Mat& m) {
    return std::string(reinterpret_cast<const char*>(m.a.data()), m.a.size());
  };
  const GroupElement id{gf::Mat::identity(g.d, g.p)};
  std::unordered_map<std::string, std::size_t> seen;
  auto elems = std::make_shared<std::vector<GroupElement>>();
  elems->push_back(id);
  seen.emplace(key_of(id.m), 0);
  std::vector<std::size_t> frontier{0};
  while (!frontier.empty()) {
    const std::size_t ui = frontier.back();
    frontier.pop_back();
    for (const GroupElement& gen : g.gens) {
      GroupElement v = (*elems)[ui] * gen;
      std::string key = key_of(v.m);
      if (seen.contains(key)) continue;
      if (elems->size() >= budget)
        throw BudgetExceeded("element enumeration budget exceeded", budget);
      seen.emplace(std::move(key), elems->size());
      frontier.push_back(elems->size());
      elems->push_back(std::move(v));
    }
  }
  if (g.order && *g.order != elems->size())
    throw std::logic_error("enumerated element count disagrees with the declared order");
  g.order = elems->size();
  g.elements = std::move(elems);
  return *g.elements;
}

}  // namespace qdesign::matgroup
