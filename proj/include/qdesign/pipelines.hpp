#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

#include "qdesign/census.hpp"
#include "qdesign/ints.hpp"
#include "qdesign/matgroup.hpp"
#include "qdesign/qarith.hpp"

namespace qdesign::pipelines {

using nlohmann::json;

struct RunResult {
  json report;
  int exit_code = 0;  // 0 holds, 2 refuted/not-a-design (3/1 are raised as errors)
};

/// Rebuilds a group from the identifier written into census headers
/// (gamma-l1 / hyperplane-levi / trivial; custom groups need their file).
matgroup::MatGroup group_from_id(const std::string& id);

struct CensusRunOptions {
  matgroup::CensusStrategy strategy = matgroup::CensusStrategy::Sampled;
  std::uint64_t seed = 1;
  int parallelism = 1;
  double budget_seconds = 0;
  std::string checkpoint_path;  // also the resume source
  std::string out_path;         // final census file; defaults to checkpoint
  std::uint64_t flush_interval = 1024;
  bool force = false;  // lifts the full-scan guard
  bool progress = false;
};

RunResult run_params(const qarith::DesignParams& params, const std::optional<Int>& group_order);

RunResult run_census(const matgroup::MatGroup& g, int k, const CensusRunOptions& opt);

/// Census + lambda: per-orbit Kramer-Mesner verdicts under the census group.
RunResult run_verify_census(const std::string& census_path, const Int& lambda,
                            const std::optional<std::string>& generators_path,
                            std::uint64_t scan_budget = 100'000'000);

/// Block file + t: brute-force verdict with witnesses.
RunResult run_verify_blocks(const std::string& blocks_path, int t);

struct ReproduceOptions {
  std::uint64_t seed = 1;
  int parallelism = 1;
  double budget_seconds = 0;
  std::string checkpoint_path;
  int max_e = 20;  // zsigmondy-scan range
  bool progress = false;
};

/// Named reproduction pipelines: lemma-2-2, lemma-3-1, lemma-3-4, lemma-3-5,
/// zsigmondy-scan, singer-scan.
RunResult run_reproduce(const std::string& id, const ReproduceOptions& opt);

}  // namespace qdesign::pipelines
