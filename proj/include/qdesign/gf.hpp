#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qdesign/errors.hpp"

namespace qdesign::gf {

/// Dense matrix over the prime field F_p, entries reduced mod p.
struct Mat {
  int rows = 0, cols = 0;
  long p = 2;
  std::vector<std::uint8_t> a;  // row major

  static Mat zero(int r, int c, long p);
  static Mat identity(int n, long p);

  std::uint8_t& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  std::uint8_t at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  bool operator==(const Mat&) const = default;
};

Mat mul(const Mat& x, const Mat& y);
Mat mat_pow(Mat m, std::uint64_t e);

/// In-place reduced row echelon form; returns the rank. Idempotent, row
/// space preserved, pivots normalized to 1 with increasing pivot columns.
int rref_inplace(Mat& m);
std::pair<Mat, int> rref(Mat m);
int rank(Mat m);
long det(Mat m);
std::optional<Mat> inverse(const Mat& m);

/// A k-dimensional subspace of F_p^d held by its unique RREF basis.
/// Equality is structural equality of the basis matrices.
struct Subspace {
  int d = 0, k = 0;
  long p = 2;
  Mat basis;  // k x d, canonical

  bool operator==(const Subspace&) const = default;
};

/// Canonical subspace spanned by the rows (any rank, any order).
Subspace subspace_from_rows(const Mat& rows);

Subspace zero_subspace(int d, long p);
Subspace full_space(int d, long p);

/// True iff sub's row space lies inside sup's. Throws AmbientMismatch when
/// the ambient spaces differ.
bool contains(const Subspace& sup, const Subspace& sub);

/// The artifact's canonical total order. Each basis row is read as an
/// integer base p with coordinate 0 the least significant digit; the row
/// sequences are compared lexicographically, first row first, ascending.
/// Under this order <e1> is the least 1-space. Returns -1/0/+1.
int lex_compare(const Subspace& a, const Subspace& b);

/// All k-subspaces of F_p^d in ascending lex order.
std::vector<Subspace> enumerate_subspaces(int d, int k, long p);

/// All t-subspaces of s, as subspaces of the ambient space.
std::vector<Subspace> subspaces_of(const Subspace& s, int t);

/// External rendering: k tokens joined by single spaces, one per basis row,
/// each the row's integer in lowercase hex with coordinate 0 as the most
/// significant digit base p.
std::string encode(const Subspace& s);

/// Inverse of encode. Rejects rows that do not already form a canonical
/// RREF basis of rank k (NotCanonical) and anything unparseable
/// (MalformedEncoding).
Subspace decode(const std::string& text, int d, int k, long p);

/// Uniformly random k-subspace: uniform k x d entries, retried until the
/// rank is k, then canonicalized. Uniform because every subspace has
/// exactly |GL_k(p)| full-rank spanning matrices.
Subspace random_subspace(int d, int k, long p, std::mt19937_64& rng);

struct SubspaceHash {
  std::size_t operator()(const Subspace& s) const;
};

}  // namespace qdesign::gf
