#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdesign/ints.hpp"

namespace qdesign::qarith {

/// Parameter tuple (t,d,k,lambda)_q of a subspace design, q = p^f.
struct DesignParams {
  int t = 0;
  int d = 0;
  int k = 0;
  Int lambda = 1;
  long p = 2;  // prime base of q
  int f = 1;   // q = p^f

  Int q() const { return ipow(Int(p), static_cast<unsigned>(f)); }

  /// Builds params from a plain prime power q, factoring it as p^f.
  /// Throws std::invalid_argument on any invariant breach
  /// (needs 1 <= t < k <= d-1, lambda >= 1, q a prime power).
  static DesignParams make(int t, int d, int k, Int lambda, long q);

  void validate() const;
  std::string str() const;  // "2-(11,5,5)_2"
};

/// An exact quotient kept as failure-is-data: raw numerator/denominator as
/// assembled from the defining formula, plus the reduced fraction. Integral
/// iff the reduced denominator is 1.
struct ExactQuotient {
  Int raw_num, raw_den;
  Int num, den;  // lowest terms, den >= 1

  bool integral() const { return den == 1; }
  const Int& value() const;  // requires integral()
};

ExactQuotient exact_quotient(Int raw_num, Int raw_den);

/// Number of k-subspaces of F_q^d, computed exactly.
Int gaussian_binomial(int d, int k, const Int& q);

/// |GL_d(q)| = prod_{i<d} (q^d - q^i).
Int gl_order(int d, const Int& q);

/// lambda * prod_{i<t} (q^(d-i)-1)/(q^(k-i)-1); non-integral means the
/// parameter tuple admits no design.
ExactQuotient block_count(const DesignParams& params);

/// lambda_2 of the 2-design reduction: lambda * [d-2, t-2]_q / [k-2, t-2]_q.
ExactQuotient lambda_two(const DesignParams& params);

/// Dual parameters (t, d, d-k, lambda')_q with
/// lambda' = lambda * [d-t, k]_q / [d-t, k-t]_q.
struct DualResult {
  std::optional<DesignParams> params;  // set iff lambda' integral
  ExactQuotient lambda_prime;
  bool integral() const { return params.has_value(); }
};
DualResult dual_params(const DesignParams& params);

/// Primitive part of q^e - 1: the largest divisor coprime to q^i - 1 for all
/// 1 <= i < e, obtained by repeated gcd stripping.
Int primitive_part(const Int& q, int e);

/// Necessary condition on the order of a block-transitive group:
/// primitive_part(q,d) * primitive_part(q,d-1) must divide 2*|G|.
/// Requires t == 2 and k <= d/2.
bool divisibility_filter(const DesignParams& params, const Int& group_order);

/// For each 3 <= k <= d/2, evaluates
///   E(p,d,k) = d (p^k - 1)(p^(k-1) - 1) / ((p^(d-1) - 1)(p - 1))
/// exactly and keeps the k for which E is a positive integer. Admissible
/// lambda for a design invariant under the Singer normalizer divide E.
std::vector<std::pair<int, Int>> singer_feasibility_scan(long p, int d);

/// A 1-(d,k,1)_q spread can exist only when k divides d.
bool spread_admissible(int d, int k);

/// Parameters (t-1, d-1, k-1, lambda)_q of the derived design.
DesignParams derived_params(const DesignParams& params);

struct FilterResult {
  std::string name;
  bool pass = false;
  std::vector<Int> witness;  // fail: the offending exact integers
  std::string note;
};

struct AdmissibilityVerdict {
  std::vector<FilterResult> filters;
  bool admissible() const;
  const FilterResult* first_failure() const;
};

/// Chains every applicable necessary condition: block-count integrality,
/// lambda_2, dual lambda', the spread condition on the fully derived design
/// when lambda = 1, and (when a group order is supplied) the primitive-part
/// filter plus |B| dividing 2|G|. Failures are data, not errors.
AdmissibilityVerdict admissibility_report(
    const DesignParams& params, const std::optional<Int>& group_order = {});

}  // namespace qdesign::qarith
