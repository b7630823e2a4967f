#include "qdesign/qarith.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>
#include <stdexcept>

namespace qdesign::qarith {

using boost::multiprecision::gcd;

namespace {

// q^a - 1
Int qpow_minus_one(const Int& q, int a) { return ipow(q, static_cast<unsigned>(a)) - 1; }

bool is_prime_long(long n) {
  if (n < 2) return false;
  for (long r = 2; r * r <= n; ++r)
    if (n % r == 0) return false;
  return true;
}

}  // namespace

DesignParams DesignParams::make(int t, int d, int k, Int lambda, long q) {
  if (q < 2) throw std::invalid_argument("q must be at least 2");
  long p = 0;
  for (long r = 2; r * r <= q; ++r) {
    if (q % r == 0) {
      p = r;
      break;
    }
  }
  if (p == 0) p = q;  // q itself prime
  int f = 0;
  long rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++f;
  }
  if (rest != 1) throw std::invalid_argument("q is not a prime power");
  DesignParams out{t, d, k, std::move(lambda), p, f};
  out.validate();
  return out;
}

void DesignParams::validate() const {
  if (!(1 <= t && t < k && k <= d - 1))
    throw std::invalid_argument("design parameters need 1 <= t < k <= d-1");
  if (lambda < 1) throw std::invalid_argument("lambda must be positive");
  if (f < 1 || !is_prime_long(p))
    throw std::invalid_argument("q must be a prime power");
}

std::string DesignParams::str() const {
  std::ostringstream os;
  os << t << "-(" << d << "," << k << "," << lambda.str() << ")_" << q().str();
  return os.str();
}

const Int& ExactQuotient::value() const {
  if (!integral()) throw std::logic_error("quotient is not integral");
  return num;
}

ExactQuotient exact_quotient(Int raw_num, Int raw_den) {
  if (raw_den == 0) throw std::invalid_argument("zero denominator");
  Int g = gcd(raw_num, raw_den);
  ExactQuotient out;
  out.num = raw_num / g;
  out.den = raw_den / g;
  if (out.den < 0) {
    out.num = -out.num;
    out.den = -out.den;
  }
  out.raw_num = std::move(raw_num);
  out.raw_den = std::move(raw_den);
  return out;
}

Int gaussian_binomial(int d, int k, const Int& q) {
  if (k < 0 || k > d) throw std::invalid_argument("gaussian binomial needs 0 <= k <= d");
  if (q < 2) throw std::invalid_argument("gaussian binomial needs q >= 2");
  Int num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    num *= qpow_minus_one(q, d - i);
    den *= qpow_minus_one(q, k - i);
  }
  Int quot = num / den;
  if (quot * den != num) throw std::logic_error("gaussian binomial not integral");
  return quot;
}

Int gl_order(int d, const Int& q) {
  Int qd = ipow(q, static_cast<unsigned>(d));
  Int out = 1;
  for (int i = 0; i < d; ++i) out *= qd - ipow(q, static_cast<unsigned>(i));
  return out;
}

ExactQuotient block_count(const DesignParams& params) {
  params.validate();
  const Int q = params.q();
  Int num = params.lambda, den = 1;
  for (int i = 0; i < params.t; ++i) {
    num *= qpow_minus_one(q, params.d - i);
    den *= qpow_minus_one(q, params.k - i);
  }
  return exact_quotient(std::move(num), std::move(den));
}

ExactQuotient lambda_two(const DesignParams& params) {
  if (params.t < 2) throw std::invalid_argument("lambda_two needs t >= 2");
  const Int q = params.q();
  Int num = params.lambda * gaussian_binomial(params.d - 2, params.t - 2, q);
  Int den = gaussian_binomial(params.k - 2, params.t - 2, q);
  return exact_quotient(std::move(num), std::move(den));
}

DualResult dual_params(const DesignParams& params) {
  params.validate();
  if (params.t > params.d - params.k)
    throw std::invalid_argument("dual block dimension d-k must exceed t");
  const Int q = params.q();
  Int num = params.lambda * gaussian_binomial(params.d - params.t, params.k, q);
  Int den = gaussian_binomial(params.d - params.t, params.k - params.t, q);
  DualResult out;
  out.lambda_prime = exact_quotient(std::move(num), std::move(den));
  if (out.lambda_prime.integral()) {
    DesignParams dual = params;
    dual.k = params.d - params.k;
    dual.lambda = out.lambda_prime.value();
    dual.validate();
    out.params = std::move(dual);
  }
  return out;
}

Int primitive_part(const Int& q, int e) {
  if (e < 1) throw std::invalid_argument("primitive_part needs e >= 1");
  if (q < 2) throw std::invalid_argument("primitive_part needs q >= 2");
  Int v = qpow_minus_one(q, e);
  bool stripped = true;
  while (stripped) {
    stripped = false;
    for (int i = 1; i < e; ++i) {
      Int g = gcd(v, qpow_minus_one(q, i));
      if (g > 1) {
        v /= g;
        stripped = true;
      }
    }
  }
  return v;
}

bool divisibility_filter(const DesignParams& params, const Int& group_order) {
  if (params.t != 2 || 2 * params.k > params.d)
    throw std::invalid_argument("divisibility_filter needs t = 2 and k <= d/2");
  const Int q = params.q();
  Int phi = primitive_part(q, params.d) * primitive_part(q, params.d - 1);
  return divides(phi, 2 * group_order);
}

std::vector<std::pair<int, Int>> singer_feasibility_scan(long p, int d) {
  if (d < 6) throw std::invalid_argument("singer_feasibility_scan needs d >= 6");
  const Int q(p);
  const Int den = qpow_minus_one(q, d - 1) * (q - 1);
  std::vector<std::pair<int, Int>> out;
  for (int k = 3; 2 * k <= d; ++k) {
    Int num = Int(d) * qpow_minus_one(q, k) * qpow_minus_one(q, k - 1);
    ExactQuotient e = exact_quotient(num, den);
    if (e.integral() && e.value() >= 1) out.emplace_back(k, e.value());
  }
  return out;
}

bool spread_admissible(int d, int k) {
  if (!(1 <= k && k <= d)) throw std::invalid_argument("spread_admissible needs 1 <= k <= d");
  return d % k == 0;
}

DesignParams derived_params(const DesignParams& params) {
  if (params.t < 2) throw std::invalid_argument("derived_params needs t >= 2");
  DesignParams out = params;
  out.t = params.t - 1;
  out.d = params.d - 1;
  out.k = params.k - 1;
  return out;
}

bool AdmissibilityVerdict::admissible() const {
  for (const auto& fr : filters)
    if (!fr.pass) return false;
  return true;
}

const FilterResult* AdmissibilityVerdict::first_failure() const {
  for (const auto& fr : filters)
    if (!fr.pass) return &fr;
  return nullptr;
}

AdmissibilityVerdict admissibility_report(const DesignParams& params,
                                          const std::optional<Int>& group_order) {
  params.validate();
  AdmissibilityVerdict verdict;
  auto add = [&](FilterResult fr) { verdict.filters.push_back(std::move(fr)); };

  ExactQuotient bc = block_count(params);
  if (bc.integral()) {
    add({"block-count", true, {bc.value()}, "|B| = " + bc.value().str()});
  } else {
    add({"block-count",
         false,
         {bc.raw_num, bc.raw_den},
         "|B| = " + bc.raw_num.str() + "/" + bc.raw_den.str() + " is not an integer"});
  }

  ExactQuotient l2 = lambda_two(params);
  if (l2.integral()) {
    add({"lambda2", true, {l2.value()}, "lambda_2 = " + l2.value().str()});
  } else {
    add({"lambda2",
         false,
         {l2.raw_num, l2.raw_den},
         "lambda_2 = " + l2.raw_num.str() + "/" + l2.raw_den.str() + " is not an integer"});
  }

  std::optional<DesignParams> dual;
  if (params.t <= params.d - params.k) {
    DualResult dr = dual_params(params);
    if (dr.integral()) {
      dual = dr.params;
      add({"dual-lambda", true, {dr.lambda_prime.value()},
           "lambda' = " + dr.lambda_prime.value().str()});
    } else {
      add({"dual-lambda",
           false,
           {dr.lambda_prime.raw_num, dr.lambda_prime.raw_den},
           "lambda' = " + dr.lambda_prime.raw_num.str() + "/" +
               dr.lambda_prime.raw_den.str() + " is not an integer"});
    }
  }

  if (params.lambda == 1) {
    // Deriving t-1 times turns a Steiner design into a spread of
    // F_q^(d-t+1) by (k-t+1)-subspaces, so the dimension must divide.
    int dd = params.d - params.t + 1;
    int kk = params.k - params.t + 1;
    bool ok = spread_admissible(dd, kk);
    add({"derived-spread", ok, ok ? std::vector<Int>{} : std::vector<Int>{Int(kk), Int(dd)},
         "derived 1-(" + std::to_string(dd) + "," + std::to_string(kk) +
             ",1) spread needs " + std::to_string(kk) + " | " + std::to_string(dd)});
  }

  if (group_order) {
    // The primitive-part condition lives on the 2-design reduction, with
    // k <= d/2 arranged through the dual when necessary.
    std::optional<DesignParams> reduced;
    if (params.t == 2) {
      reduced = params;
    } else if (l2.integral()) {
      reduced = params;
      reduced->t = 2;
      reduced->lambda = l2.value();
    }
    if (reduced && 2 * reduced->k > reduced->d) {
      if (reduced->t <= reduced->d - reduced->k) {
        DualResult dr = dual_params(*reduced);
        reduced = dr.integral() ? dr.params : std::nullopt;
      } else {
        reduced = std::nullopt;
      }
    }
    if (reduced) {
      Int phi = primitive_part(reduced->q(), reduced->d) *
                primitive_part(reduced->q(), reduced->d - 1);
      bool ok = divisibility_filter(*reduced, *group_order);
      add({"phi-divisibility", ok, {phi, 2 * *group_order},
           "primitive parts " + phi.str() + (ok ? " divide " : " do not divide ") +
               "2|G| = " + (2 * *group_order).str()});
    }
    if (bc.integral()) {
      bool ok = divides(bc.value(), 2 * *group_order);
      add({"block-transitive-count", ok, {bc.value(), 2 * *group_order},
           "|B| = " + bc.value().str() + (ok ? " divides " : " does not divide ") +
               "2|G| = " + (2 * *group_order).str()});
    }
  }

  return verdict;
}

}  // namespace qdesign::qarith
