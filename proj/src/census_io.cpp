#include "qdesign/census_io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "qdesign/errors.hpp"
#include "qdesign/qarith.hpp"

namespace qdesign::io {

namespace {

std::string getline_checked(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw CheckpointError("unexpected end of file in " + path);
  return line;
}

// parses "key=value" pairs from a header line in fixed order
std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string expect_kv(const std::string& tok, const std::string& key, const std::string& path) {
  const std::string prefix = key + "=";
  if (tok.rfind(prefix, 0) != 0)
    throw CheckpointError("malformed header (wanted " + key + "=...) in " + path);
  return tok.substr(prefix.size());
}

}  // namespace

void write_census(const std::string& path, const matgroup::OrbitCensus& census) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  out << "qdesign-census v1\n";
  out << "d=" << census.d << " k=" << census.k << " p=" << census.p << "\n";
  out << "group=" << census.group_id << " order=" << census.group_order << "\n";
  out << "expected=" << census.expected_total.str() << " lexorder=" << kLexOrderTag << "\n";
  for (const auto& e : census.entries) out << gf::encode(e.rep) << ' ' << e.size << "\n";
  out.flush();
  if (!out) throw CheckpointError("write failed for " + path);
}

matgroup::OrbitCensus read_census(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  if (getline_checked(in, path) != "qdesign-census v1")
    throw CheckpointError("bad census magic in " + path);

  matgroup::OrbitCensus census;
  {
    auto toks = split_ws(getline_checked(in, path));
    if (toks.size() != 3) throw CheckpointError("malformed dimension line in " + path);
    census.d = std::stoi(expect_kv(toks[0], "d", path));
    census.k = std::stoi(expect_kv(toks[1], "k", path));
    census.p = std::stol(expect_kv(toks[2], "p", path));
  }
  {
    auto toks = split_ws(getline_checked(in, path));
    if (toks.size() != 2) throw CheckpointError("malformed group line in " + path);
    census.group_id = expect_kv(toks[0], "group", path);
    census.group_order = std::stoull(expect_kv(toks[1], "order", path));
  }
  {
    auto toks = split_ws(getline_checked(in, path));
    if (toks.size() != 2) throw CheckpointError("malformed expected line in " + path);
    census.expected_total = Int(expect_kv(toks[0], "expected", path));
    const std::string tag = expect_kv(toks[1], "lexorder", path);
    if (tag != kLexOrderTag)
      throw CheckpointError("census " + path + " uses lex order '" + tag + "', this build uses '" +
                            kLexOrderTag + "'");
  }

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) throw CheckpointError("blank body line in " + path);
    const std::size_t cut = line.find_last_of(' ');
    if (cut == std::string::npos) throw CheckpointError("malformed body line in " + path);
    matgroup::OrbitEntry entry;
    try {
      entry.rep = gf::decode(line.substr(0, cut), census.d, census.k, census.p);
    } catch (const std::exception& e) {
      throw CheckpointError("bad representative in " + path + ": " + e.what());
    }
    entry.size = std::stoull(line.substr(cut + 1));
    if (entry.size == 0) throw CheckpointError("zero orbit size in " + path);
    if (!census.entries.empty() &&
        gf::lex_compare(census.entries.back().rep, entry.rep) >= 0)
      throw CheckpointError("body of " + path + " is not strictly ascending");
    census.entries.push_back(std::move(entry));
  }
  if (census.certificate() > census.expected_total)
    throw CheckpointError("census " + path + " certifies more subspaces than exist");
  return census;
}

void write_blocks(const std::string& path, int d, int k, long p,
                  const std::vector<gf::Subspace>& blocks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  out << "qdesign-blocks v1\n";
  out << "d=" << d << " k=" << k << " p=" << p << "\n";
  for (const auto& b : blocks) out << gf::encode(b) << "\n";
  out.flush();
  if (!out) throw CheckpointError("write failed for " + path);
}

BlockFile read_blocks(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  if (getline_checked(in, path) != "qdesign-blocks v1")
    throw CheckpointError("bad block-file magic in " + path);
  BlockFile bf;
  {
    auto toks = split_ws(getline_checked(in, path));
    if (toks.size() != 3) throw CheckpointError("malformed dimension line in " + path);
    bf.d = std::stoi(expect_kv(toks[0], "d", path));
    bf.k = std::stoi(expect_kv(toks[1], "k", path));
    bf.p = std::stol(expect_kv(toks[2], "p", path));
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    bf.blocks.push_back(gf::decode(line, bf.d, bf.k, bf.p));
  }
  return bf;
}

void write_generators(const std::string& path, const matgroup::MatGroup& g) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  out << "qdesign-generators v1\n";
  out << "d=" << g.d << " p=" << g.p << " order=" << g.order.value_or(0) << "\n";
  for (const auto& e : g.gens) {
    gf::Subspace rowview{g.d, g.d, g.p, e.m};
    out << gf::encode(rowview) << "\n";
  }
  out.flush();
  if (!out) throw CheckpointError("write failed for " + path);
}

matgroup::MatGroup read_generators(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  if (getline_checked(in, path) != "qdesign-generators v1")
    throw CheckpointError("bad generator-file magic in " + path);
  int d;
  long p;
  std::uint64_t order;
  {
    auto toks = split_ws(getline_checked(in, path));
    if (toks.size() != 3) throw CheckpointError("malformed dimension line in " + path);
    d = std::stoi(expect_kv(toks[0], "d", path));
    p = std::stol(expect_kv(toks[1], "p", path));
    order = std::stoull(expect_kv(toks[2], "order", path));
  }
  std::vector<matgroup::GroupElement> gens;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::vector<std::string> toks = split_ws(line);
    if (static_cast<int>(toks.size()) != d)
      throw CheckpointError("generator line needs " + std::to_string(d) + " rows in " + path);
    gf::Mat m = gf::Mat::zero(d, d, p);
    for (int i = 0; i < d; ++i) {
      unsigned long long v = 0;
      for (char ch : toks[i]) {
        int digit;
        if (ch >= '0' && ch <= '9')
          digit = ch - '0';
        else if (ch >= 'a' && ch <= 'f')
          digit = ch - 'a' + 10;
        else
          throw CheckpointError("bad hex digit in " + path);
        v = v * 16 + static_cast<unsigned long long>(digit);
      }
      for (int j = d - 1; j >= 0; --j) {
        m.at(i, j) = static_cast<std::uint8_t>(v % static_cast<unsigned long long>(p));
        v /= static_cast<unsigned long long>(p);
      }
    }
    gens.push_back(matgroup::GroupElement::from(std::move(m)));
  }
  return matgroup::group_from_generators(
      "custom:" + path, std::move(gens),
      order ? std::optional<std::uint64_t>(order) : std::nullopt);
}

LockFile::LockFile(const std::string& path) : lock_path_(path + ".lock") {
  fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd_ < 0)
    throw CheckpointError("checkpoint " + path +
                          " is locked by another process (remove " + lock_path_ +
                          " if that process is gone)");
  const std::string pid = std::to_string(::getpid()) + "\n";
  if (::write(fd_, pid.data(), pid.size()) < 0) {
    // lock still holds; pid note is advisory
  }
}

LockFile::~LockFile() {
  if (fd_ >= 0) {
    ::close(fd_);
    ::unlink(lock_path_.c_str());
  }
}

}  // namespace qdesign::io
