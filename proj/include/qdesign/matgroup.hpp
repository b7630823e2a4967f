#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdesign/gf.hpp"

namespace qdesign::matgroup {

/// Invertible d x d matrix over F_p acting on row vectors from the right.
struct GroupElement {
  gf::Mat m;

  static GroupElement from(gf::Mat m);  // checks invertibility
  int dim() const { return m.rows; }
  long p() const { return m.p; }
  bool operator==(const GroupElement&) const = default;
};

GroupElement operator*(const GroupElement& x, const GroupElement& y);
GroupElement inverse(const GroupElement& g);

/// Group given by generators, with an optional full element cache and an
/// optional known order. The cache, once set, is closed under the
/// generators and duplicate free.
struct MatGroup {
  int d = 0;
  long p = 2;
  std::string id;
  std::vector<GroupElement> gens;
  std::optional<std::uint64_t> order;
  std::shared_ptr<const std::vector<GroupElement>> elements;
};

MatGroup trivial_group(int d, long p);
MatGroup group_from_generators(std::string id, std::vector<GroupElement> gens,
                               std::optional<std::uint64_t> order = {});

/// Right action on subspaces: the canonical span of (basis of s) * g.
gf::Subspace act(const gf::Subspace& s, const GroupElement& g);

/// Least n >= 1 with g^n = 1, by iterated multiplication.
std::uint64_t element_order(const GroupElement& g);

/// Monic degree-d polynomial over F_p as coefficients c[0..d], c[d] = 1.
using Poly = std::vector<int>;

/// Companion matrix of a primitive polynomial; multiplication by a
/// generator of the multiplicative group of F_(p^d). The order p^d - 1 is
/// verified on construction; NotPrimitive otherwise.
GroupElement singer_element(long p, int d, const Poly& poly);

/// Matrix of x -> x^p on F_p[x]/(poly) in the power basis.
GroupElement frobenius_element(long p, int d, const Poly& poly);

/// Normalizer of the Singer cycle generated by singer and frobenius
/// elements; order d * (p^d - 1).
MatGroup gamma_l1(long p, int d, const Poly& poly);
MatGroup gamma_l1(long p, int d);  // uses the default polynomial table

/// Fixed table of primitive polynomials; throws std::out_of_range when no
/// default is recorded for (p, d). Every entry is order-verified on use.
Poly default_primitive_poly(long p, int d);

/// Two generators of SL_m(p): the transvection I + E_01 and a signed
/// m-cycle of the basis.
std::vector<GroupElement> sl_generators(int m, long p);

/// Stabilizer structure of the hyperplane W = <e_1, ..., e_(dd-1)>:
/// K = SL_(dd-1)(p) acting on W and fixing e_0, H = K extended by the
/// transvection e_0 -> e_0 + e_1 generating the full affine stabilizer.
std::pair<MatGroup, MatGroup> hyperplane_levi(int dd, long p);

inline constexpr std::uint64_t kDefaultOrbitBudget = 1ull << 28;

/// Full orbit of s by breadth-first closure under the generators.
std::vector<gf::Subspace> orbit(const MatGroup& g, const gf::Subspace& s,
                                std::uint64_t budget = kDefaultOrbitBudget);

/// Lex-least member of the orbit and the orbit size.
std::pair<gf::Subspace, std::uint64_t> orbit_min(const MatGroup& g, const gf::Subspace& s,
                                                 std::uint64_t budget = kDefaultOrbitBudget);

/// All group elements by closure enumeration; fills the cache and the known
/// order. Throws BudgetExceeded past the budget.
const std::vector<GroupElement>& enumerate_elements(MatGroup& g, std::uint64_t budget);

}  // namespace qdesign::matgroup
