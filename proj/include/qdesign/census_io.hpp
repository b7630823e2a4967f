#pragma once

#include <string>
#include <vector>

#include "qdesign/census.hpp"
#include "qdesign/matgroup.hpp"

namespace qdesign::io {

inline constexpr const char* kLexOrderTag = "c0lsb-asc-v1";
inline constexpr const char* kToolkitVersion = "qdesign 0.1.0";

/// Census file, bit-exact:
///   line 1  qdesign-census v1
///   line 2  d=<int> k=<int> p=<int>
///   line 3  group=<spec> order=<int>
///   line 4  expected=<int> lexorder=<tag>
///   body    <hex rows, space separated> <orbit size>
/// UTF-8, newline \n, no trailing whitespace, body ascending by lex order.
void write_census(const std::string& path, const matgroup::OrbitCensus& census);
matgroup::OrbitCensus read_census(const std::string& path);

/// Block file:
///   line 1  qdesign-blocks v1
///   line 2  d=<int> k=<int> p=<int>
///   body    <hex rows, space separated>
void write_blocks(const std::string& path, int d, int k, long p,
                  const std::vector<gf::Subspace>& blocks);
struct BlockFile {
  int d = 0, k = 0;
  long p = 2;
  std::vector<gf::Subspace> blocks;
};
BlockFile read_blocks(const std::string& path);

/// Generator file:
///   line 1  qdesign-generators v1
///   line 2  d=<int> p=<int> order=<int>
///   body    one generator per line, d hex row tokens
matgroup::MatGroup read_generators(const std::string& path);
void write_generators(const std::string& path, const matgroup::MatGroup& g);

/// Advisory exclusive lock; a second lock on the same path throws
/// CheckpointError. Released on destruction.
class LockFile {
 public:
  explicit LockFile(const std::string& path);
  ~LockFile();
  LockFile(const LockFile&) = delete;
  LockFile& operator=(const LockFile&) = delete;

 private:
  std::string lock_path_;
  int fd_ = -1;
};

}  // namespace qdesign::io
