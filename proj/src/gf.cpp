#include "qdesign/gf.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace qdesign::gf {

Mat Mat::zero(int r, int c, long p) {
  Mat m;
  m.rows = r;
  m.cols = c;
  m.p = p;
  m.a.assign(static_cast<std::size_t>(r) * c, 0);
  return m;
}

Mat Mat::identity(int n, long p) {
  Mat m = zero(n, n, p);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Mat mul(const Mat& x, const Mat& y) {
  if (x.cols != y.rows || x.p != y.p) throw AmbientMismatch("matrix product shape/field mismatch");
  Mat out = Mat::zero(x.rows, y.cols, x.p);
  for (int i = 0; i < x.rows; ++i) {
    for (int l = 0; l < x.cols; ++l) {
      const int xv = x.at(i, l);
      if (xv == 0) continue;
      for (int j = 0; j < y.cols; ++j) {
        out.at(i, j) = static_cast<std::uint8_t>((out.at(i, j) + xv * y.at(l, j)) % x.p);
      }
    }
  }
  return out;
}

Mat mat_pow(Mat m, std::uint64_t e) {
  if (m.rows != m.cols) throw AmbientMismatch("mat_pow needs a square matrix");
  Mat acc = Mat::identity(m.rows, m.p);
  while (e) {
    if (e & 1) acc = mul(acc, m);
    m = mul(m, m);
    e >>= 1;
  }
  return acc;
}

namespace {

// modular inverse in F_p by Fermat; p is prime and tiny
int inv_mod(int x, long p) {
  int r = 1;
  long e = p - 2;
  long b = x % p;
  while (e) {
    if (e & 1) r = static_cast<int>((r * b) % p);
    b = (b * b) % p;
    e >>= 1;
  }
  return r;
}

}  // namespace

int rref_inplace(Mat& m) {
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int piv = -1;
    for (int i = r; i < m.rows; ++i) {
      if (m.at(i, c) != 0) {
        piv = i;
        break;
      }
    }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(r, j));
    if (m.at(r, c) != 1) {
      const int iv = inv_mod(m.at(r, c), m.p);
      for (int j = 0; j < m.cols; ++j)
        m.at(r, j) = static_cast<std::uint8_t>((m.at(r, j) * iv) % m.p);
    }
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      const int f = m.at(i, c);
      for (int j = 0; j < m.cols; ++j) {
        int v = m.at(i, j) - f * m.at(r, j);
        v %= static_cast<int>(m.p);
        if (v < 0) v += static_cast<int>(m.p);
        m.at(i, j) = static_cast<std::uint8_t>(v);
      }
    }
    ++r;
  }
  return r;
}

std::pair<Mat, int> rref(Mat m) {
  int r = rref_inplace(m);
  return {std::move(m), r};
}

int rank(Mat m) { return rref_inplace(m); }

long det(Mat m) {
  if (m.rows != m.cols) throw AmbientMismatch("det needs a square matrix");
  long sign = 1, prod = 1;
  const long p = m.p;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int piv = -1;
    for (int i = r; i < m.rows; ++i)
      if (m.at(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return 0;
    if (piv != r) {
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(r, j));
      sign = -sign;
    }
    prod = (prod * m.at(r, c)) % p;
    const int iv = inv_mod(m.at(r, c), p);
    for (int i = r + 1; i < m.rows; ++i) {
      if (m.at(i, c) == 0) continue;
      const int f = static_cast<int>((m.at(i, c) * static_cast<long>(iv)) % p);
      for (int j = c; j < m.cols; ++j) {
        int v = m.at(i, j) - f * m.at(r, j);
        v %= static_cast<int>(p);
        if (v < 0) v += static_cast<int>(p);
        m.at(i, j) = static_cast<std::uint8_t>(v);
      }
    }
    ++r;
  }
  long out = (sign < 0) ? (p - prod) % p : prod;
  return out;
}

std::optional<Mat> inverse(const Mat& m) {
  if (m.rows != m.cols) throw AmbientMismatch("inverse needs a square matrix");
  const int n = m.rows;
  Mat aug = Mat::zero(n, 2 * n, m.p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = 1;
  }
  if (rref_inplace(aug) < n) return std::nullopt;
  Mat out = Mat::zero(n, n, m.p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = aug.at(i, n + j);
  return out;
}

Subspace subspace_from_rows(const Mat& rows) {
  Mat m = rows;
  int r = rref_inplace(m);
  Subspace s;
  s.d = rows.cols;
  s.k = r;
  s.p = rows.p;
  s.basis = Mat::zero(r, rows.cols, rows.p);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < rows.cols; ++j) s.basis.at(i, j) = m.at(i, j);
  return s;
}

Subspace zero_subspace(int d, long p) {
  Subspace s;
  s.d = d;
  s.k = 0;
  s.p = p;
  s.basis = Mat::zero(0, d, p);
  return s;
}

Subspace full_space(int d, long p) {
  Subspace s;
  s.d = d;
  s.k = d;
  s.p = p;
  s.basis = Mat::identity(d, p);
  return s;
}

bool contains(const Subspace& sup, const Subspace& sub) {
  if (sup.d != sub.d || sup.p != sub.p) throw AmbientMismatch("contains: ambient mismatch");
  if (sub.k > sup.k) return false;
  // pivot column of each sup row
  std::vector<int> piv(sup.k);
  for (int i = 0; i < sup.k; ++i) {
    int c = 0;
    while (c < sup.d && sup.basis.at(i, c) == 0) ++c;
    piv[i] = c;
  }
  std::vector<int> v(static_cast<std::size_t>(sub.d));
  for (int r = 0; r < sub.k; ++r) {
    for (int j = 0; j < sub.d; ++j) v[j] = sub.basis.at(r, j);
    for (int i = 0; i < sup.k; ++i) {
      const int f = v[piv[i]];
      if (f == 0) continue;
      for (int j = piv[i]; j < sub.d; ++j) {
        v[j] -= f * sup.basis.at(i, j);
        v[j] %= static_cast<int>(sup.p);
        if (v[j] < 0) v[j] += static_cast<int>(sup.p);
      }
    }
    for (int j = 0; j < sub.d; ++j)
      if (v[j] != 0) return false;
  }
  return true;
}

int lex_compare(const Subspace& a, const Subspace& b) {
  if (a.d != b.d || a.p != b.p || a.k != b.k)
    throw AmbientMismatch("lex_compare: shape mismatch");
  for (int i = 0; i < a.k; ++i) {
    // row as integer, coordinate 0 least significant: most significant
    // digit is coordinate d-1
    for (int j = a.d - 1; j >= 0; --j) {
      const int av = a.basis.at(i, j), bv = b.basis.at(i, j);
      if (av != bv) return av < bv ? -1 : 1;
    }
  }
  return 0;
}

std::vector<Subspace> enumerate_subspaces(int d, int k, long p) {
  if (k < 0 || k > d) throw std::invalid_argument("enumerate_subspaces needs 0 <= k <= d");
  std::vector<Subspace> out;
  if (k == 0) {
    out.push_back(zero_subspace(d, p));
    return out;
  }
  std::vector<int> piv(k);
  for (int i = 0; i < k; ++i) piv[i] = i;
  while (true) {
    std::vector<bool> is_piv(d, false);
    for (int c : piv) is_piv[c] = true;
    std::vector<std::pair<int, int>> free_cells;
    for (int i = 0; i < k; ++i)
      for (int j = piv[i] + 1; j < d; ++j)
        if (!is_piv[j]) free_cells.emplace_back(i, j);

    std::vector<std::uint8_t> vals(free_cells.size(), 0);
    while (true) {
      Subspace s;
      s.d = d;
      s.k = k;
      s.p = p;
      s.basis = Mat::zero(k, d, p);
      for (int i = 0; i < k; ++i) s.basis.at(i, piv[i]) = 1;
      for (std::size_t c = 0; c < free_cells.size(); ++c)
        s.basis.at(free_cells[c].first, free_cells[c].second) = vals[c];
      out.push_back(std::move(s));

      std::size_t c = 0;
      while (c < vals.size() && vals[c] == p - 1) vals[c++] = 0;
      if (c == vals.size()) break;
      ++vals[c];
    }

    // next pivot combination
    int i = k - 1;
    while (i >= 0 && piv[i] == d - k + i) --i;
    if (i < 0) break;
    ++piv[i];
    for (int j = i + 1; j < k; ++j) piv[j] = piv[j - 1] + 1;
  }
  std::sort(out.begin(), out.end(),
            [](const Subspace& x, const Subspace& y) { return lex_compare(x, y) < 0; });
  return out;
}

std::vector<Subspace> subspaces_of(const Subspace& s, int t) {
  if (t < 0 || t > s.k) throw std::invalid_argument("subspaces_of needs 0 <= t <= dim");
  std::vector<Subspace> out;
  for (const Subspace& c : enumerate_subspaces(s.k, t, s.p)) {
    out.push_back(subspace_from_rows(mul(c.basis, s.basis)));
  }
  return out;
}

namespace {

unsigned long long row_int_msb(const Subspace& s, int i) {
  unsigned long long v = 0;
  for (int j = 0; j < s.d; ++j) v = v * static_cast<unsigned long long>(s.p) + s.basis.at(i, j);
  return v;
}

}  // namespace

std::string encode(const Subspace& s) {
  std::ostringstream os;
  os << std::hex;
  for (int i = 0; i < s.k; ++i) {
    if (i) os << ' ';
    os << row_int_msb(s, i);
  }
  return os.str();
}

Subspace decode(const std::string& text, int d, int k, long p) {
  std::istringstream is(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (is >> tok) tokens.push_back(tok);
  if (static_cast<int>(tokens.size()) != k)
    throw MalformedEncoding("expected " + std::to_string(k) + " row tokens, got " +
                            std::to_string(tokens.size()));
  Mat m = Mat::zero(k, d, p);
  unsigned long long limit = 1;
  for (int j = 0; j < d; ++j) limit *= static_cast<unsigned long long>(p);
  for (int i = 0; i < k; ++i) {
    unsigned long long v = 0;
    for (char ch : tokens[i]) {
      int digit;
      if (ch >= '0' && ch <= '9')
        digit = ch - '0';
      else if (ch >= 'a' && ch <= 'f')
        digit = ch - 'a' + 10;
      else
        throw MalformedEncoding("bad hex digit in row token");
      v = v * 16 + static_cast<unsigned long long>(digit);
      if (v >= limit) throw MalformedEncoding("row value out of range");
    }
    for (int j = d - 1; j >= 0; --j) {
      m.at(i, j) = static_cast<std::uint8_t>(v % static_cast<unsigned long long>(p));
      v /= static_cast<unsigned long long>(p);
    }
  }
  Subspace s = subspace_from_rows(m);
  if (s.k != k || s.basis != m) throw NotCanonical("rows are not a canonical rank-k RREF basis");
  return s;
}

Subspace random_subspace(int d, int k, long p, std::mt19937_64& rng) {
  if (k < 0 || k > d) throw std::invalid_argument("random_subspace needs 0 <= k <= d");
  std::uniform_int_distribution<int> dist(0, static_cast<int>(p) - 1);
  Mat m = Mat::zero(k, d, p);
  while (true) {
    for (auto& e : m.a) e = static_cast<std::uint8_t>(dist(rng));
    Subspace s = subspace_from_rows(m);
    if (s.k == k) return s;
  }
}

std::size_t SubspaceHash::operator()(const Subspace& s) const {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](std::size_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::size_t>(s.d));
  mix(static_cast<std::size_t>(s.k));
  mix(static_cast<std::size_t>(s.p));
  for (std::uint8_t e : s.basis.a) mix(e);
  return h;
}

}  // namespace qdesign::gf
