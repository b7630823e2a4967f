#include "qdesign/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "qdesign/census_io.hpp"
#include "qdesign/designs.hpp"
#include "qdesign/errors.hpp"

namespace qdesign::pipelines {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

json make_report(const std::string& pipeline, json inputs, json outputs, json certificates,
                 double elapsed) {
  inputs["lexorder"] = io::kLexOrderTag;
  return json{{"pipeline", pipeline},
              {"inputs", std::move(inputs)},
              {"outputs", std::move(outputs)},
              {"certificates", std::move(certificates)},
              {"version", io::kToolkitVersion},
              {"elapsed_seconds", elapsed}};
}

std::vector<std::uint64_t> factorize(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t r = 2; r * r <= n; ++r)
    while (n % r == 0) {
      out.push_back(r);
      n /= r;
    }
  if (n > 1) out.push_back(n);
  return out;
}

std::map<std::string, std::string> parse_kv_list(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) continue;
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

matgroup::Poly poly_from_hex(long p, int d, const std::string& hex) {
  unsigned long long v = 0;
  for (char ch : hex) {
    int digit;
    if (ch >= '0' && ch <= '9')
      digit = ch - '0';
    else if (ch >= 'a' && ch <= 'f')
      digit = ch - 'a' + 10;
    else
      throw std::invalid_argument("bad polynomial hex");
    v = v * 16 + static_cast<unsigned long long>(digit);
  }
  matgroup::Poly poly(d + 1, 0);
  for (int i = 0; i <= d; ++i) {
    poly[i] = static_cast<int>(v % static_cast<unsigned long long>(p));
    v /= static_cast<unsigned long long>(p);
  }
  if (v != 0) throw std::invalid_argument("polynomial hex too long for degree d");
  return poly;
}

json size_histogram(const matgroup::OrbitCensus& census) {
  std::map<std::uint64_t, std::uint64_t> hist;
  for (const auto& e : census.entries) ++hist[e.size];
  json out = json::object();
  for (const auto& [size, count] : hist) out[std::to_string(size)] = count;
  return out;
}

}  // namespace

matgroup::MatGroup group_from_id(const std::string& id) {
  const auto colon = id.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("malformed group id: " + id);
  const std::string kind = id.substr(0, colon);
  const std::string rest = id.substr(colon + 1);
  if (kind == "gamma-l1") {
    auto kv = parse_kv_list(rest);
    const long p = std::stol(kv.at("p"));
    const int d = std::stoi(kv.at("d"));
    return matgroup::gamma_l1(p, d, poly_from_hex(p, d, kv.at("poly")));
  }
  if (kind == "hyperplane-levi") {
    const auto comma = rest.find(',');
    const std::string which = rest.substr(0, comma);
    auto kv = parse_kv_list(rest.substr(comma + 1));
    auto [kgrp, hgrp] = matgroup::hyperplane_levi(std::stoi(kv.at("dd")), std::stol(kv.at("p")));
    if (which == "K") return kgrp;
    if (which == "H") return hgrp;
    throw std::invalid_argument("hyperplane-levi wants :K or :H");
  }
  if (kind == "trivial") {
    auto kv = parse_kv_list(rest);
    return matgroup::trivial_group(std::stoi(kv.at("d")), std::stol(kv.at("p")));
  }
  throw std::invalid_argument("cannot rebuild group from id: " + id);
}

RunResult run_params(const qarith::DesignParams& params, const std::optional<Int>& group_order) {
  Stopwatch sw;
  qarith::AdmissibilityVerdict verdict = qarith::admissibility_report(params, group_order);
  json filters = json::array();
  for (const auto& fr : verdict.filters) {
    json wit = json::array();
    for (const Int& w : fr.witness) wit.push_back(w.str());
    filters.push_back(
        {{"filter", fr.name}, {"pass", fr.pass}, {"witness", wit}, {"note", fr.note}});
  }
  json inputs{{"t", params.t}, {"d", params.d},      {"k", params.k},
              {"lambda", params.lambda.str()},       {"q", params.q().str()}};
  if (group_order) inputs["group_order"] = group_order->str();
  json outputs{{"params", params.str()},
               {"admissible", verdict.admissible()},
               {"filters", filters}};
  if (const auto* fail = verdict.first_failure()) outputs["refuted_by"] = fail->name;
  json report = make_report("params", inputs, outputs, json::object(), sw.seconds());
  return {std::move(report), verdict.admissible() ? 0 : 2};
}

RunResult run_census(const matgroup::MatGroup& g, int k, const CensusRunOptions& opt) {
  Stopwatch sw;
  matgroup::CensusOptions copt;
  copt.strategy = opt.strategy;
  copt.seed = opt.seed;
  copt.parallelism = opt.parallelism;
  copt.budget_seconds = opt.budget_seconds;
  copt.checkpoint_path = opt.checkpoint_path;
  copt.flush_interval = opt.flush_interval;
  if (opt.force) copt.scan_budget = UINT64_MAX;
  if (opt.progress) {
    copt.progress = [](std::uint64_t orbits, const Int& cert) {
      if (orbits % 1000 == 0)
        std::fprintf(stderr, "  %llu orbits, certificate %s\n",
                     static_cast<unsigned long long>(orbits), cert.str().c_str());
    };
  }

  std::optional<io::LockFile> lock;
  matgroup::OrbitCensus census;
  if (!opt.checkpoint_path.empty()) {
    lock.emplace(opt.checkpoint_path);
    if (std::filesystem::exists(opt.checkpoint_path)) {
      matgroup::OrbitCensus partial = io::read_census(opt.checkpoint_path);
      if (partial.k != k) throw CheckpointError("checkpoint has a different block dimension");
      census = matgroup::orbit_census_resume(g, partial, copt);
    } else {
      census = matgroup::orbit_census(g, g.d, k, copt);
    }
  } else {
    census = matgroup::orbit_census(g, g.d, k, copt);
  }

  const std::string out_path = opt.out_path.empty() ? opt.checkpoint_path : opt.out_path;
  if (!out_path.empty()) io::write_census(out_path, census);

  json inputs{{"group", g.id},
              {"order", census.group_order},
              {"d", census.d},
              {"k", census.k},
              {"p", census.p},
              {"strategy", opt.strategy == matgroup::CensusStrategy::Sampled ? "sampled"
                                                                             : "full-scan"},
              {"seed", opt.seed},
              {"parallelism", opt.parallelism}};
  json outputs{{"orbits", census.entries.size()},
               {"orbit_sizes", size_histogram(census)},
               {"complete", census.complete()}};
  if (!out_path.empty()) outputs["file"] = out_path;
  json certificates{{"expected", census.expected_total.str()},
                    {"certificate", census.certificate().str()}};
  return {make_report("census", inputs, outputs, certificates, sw.seconds()), 0};
}

namespace {

struct CensusVerify {
  std::uint64_t candidates = 0;
  std::uint64_t designs = 0;
  json design_reps = json::array();
};

CensusVerify verify_census_orbits(const matgroup::MatGroup& g,
                                  const matgroup::OrbitCensus& blocks,
                                  const matgroup::OrbitCensus& tc, const Int& lambda,
                                  const Int& expected_block_count, bool count_integral) {
  CensusVerify out;
  for (const auto& entry : blocks.entries) {
    // block-transitivity forces |orbit| = |B|; skip the rest cheaply
    if (!count_integral || Int(entry.size) != expected_block_count) continue;
    ++out.candidates;
    if (designs::orbit_is_design(g, entry.rep, entry.size, tc, lambda)) {
      ++out.designs;
      out.design_reps.push_back(gf::encode(entry.rep));
    }
  }
  return out;
}

}  // namespace

RunResult run_verify_census(const std::string& census_path, const Int& lambda,
                            const std::optional<std::string>& generators_path,
                            std::uint64_t scan_budget) {
  Stopwatch sw;
  matgroup::OrbitCensus blocks = io::read_census(census_path);
  if (!blocks.complete())
    throw IncompleteCensus("census " + census_path + " is incomplete; finish it first");
  matgroup::MatGroup g = generators_path ? io::read_generators(*generators_path)
                                         : group_from_id(blocks.group_id);

  qarith::DesignParams params =
      qarith::DesignParams::make(2, blocks.d, blocks.k, lambda, blocks.p);
  qarith::ExactQuotient bc = qarith::block_count(params);

  matgroup::CensusOptions copt;
  copt.strategy = matgroup::CensusStrategy::FullScan;
  copt.scan_budget = scan_budget;
  copt.build_member_index = true;
  matgroup::OrbitCensus tc = matgroup::orbit_census(g, blocks.d, 2, copt);

  CensusVerify cv =
      verify_census_orbits(g, blocks, tc, lambda, bc.integral() ? bc.value() : Int(-1),
                           bc.integral());

  json inputs{{"census", census_path}, {"group", blocks.group_id}, {"t", 2},
              {"lambda", lambda.str()}};
  json outputs{{"orbits", blocks.entries.size()},
               {"expected_block_count", bc.integral() ? bc.value().str() : "non-integral"},
               {"size_filter_candidates", cv.candidates},
               {"design_orbits", cv.designs},
               {"designs", cv.design_reps}};
  json certificates{{"blocks_certificate", blocks.certificate().str()},
                    {"t_census_certificate", tc.certificate().str()},
                    {"t_orbits", tc.entries.size()}};
  return {make_report("verify", inputs, outputs, certificates, sw.seconds()),
          cv.designs > 0 ? 0 : 2};
}

RunResult run_verify_blocks(const std::string& blocks_path, int t) {
  Stopwatch sw;
  io::BlockFile bf = io::read_blocks(blocks_path);
  designs::BlockSet bs = designs::BlockSet::from(bf.d, bf.k, bf.p, std::move(bf.blocks));
  designs::VerifyOutcome vo = designs::verify_design(bs, t);
  json inputs{{"blocks", blocks_path}, {"d", bf.d}, {"k", bf.k}, {"p", bf.p}, {"t", t},
              {"block_count", bs.blocks.size()}};
  json outputs{{"is_design", vo.is_design}};
  if (vo.is_design) {
    outputs["lambda"] = vo.lambda.str();
  } else {
    outputs["witness"] = {{"t_space_a", gf::encode(vo.witness_a)},
                          {"count_a", vo.count_a.str()},
                          {"t_space_b", gf::encode(vo.witness_b)},
                          {"count_b", vo.count_b.str()}};
  }
  return {make_report("verify", inputs, outputs, json::object(), sw.seconds()),
          vo.is_design ? 0 : 2};
}

namespace {

RunResult reproduce_lemma_2_2(const ReproduceOptions&) {
  Stopwatch sw;
  auto [kgrp, hgrp] = matgroup::hyperplane_levi(6, 2);
  matgroup::CensusOptions copt;
  copt.strategy = matgroup::CensusStrategy::FullScan;
  matgroup::OrbitCensus ck = matgroup::orbit_census(kgrp, 6, 3, copt);
  matgroup::OrbitCensus ch = matgroup::orbit_census(hgrp, 6, 3, copt);

  bool k_ok = ck.entries.size() == 9;
  for (const auto& e : ck.entries) k_ok = k_ok && e.size == 155;
  std::multiset<std::uint64_t> h_sizes;
  for (const auto& e : ch.entries) h_sizes.insert(e.size);
  const bool h_ok = h_sizes == std::multiset<std::uint64_t>{155, 1240};
  const bool holds = k_ok && h_ok && ck.complete() && ch.complete();

  json outputs{{"levi_orbits", ck.entries.size()},
               {"levi_sizes", size_histogram(ck)},
               {"stabilizer_orbits", ch.entries.size()},
               {"stabilizer_sizes", size_histogram(ch)},
               {"expected", {{"levi", "9 orbits of 155"}, {"stabilizer", "155 and 1240"}}},
               {"holds", holds}};
  json certificates{{"levi_certificate", ck.certificate().str()},
                    {"stabilizer_certificate", ch.certificate().str()}};
  return {make_report("lemma-2-2", json{{"dd", 6}, {"p", 2}, {"k", 3}}, outputs, certificates,
                      sw.seconds()),
          holds ? 0 : 2};
}

RunResult reproduce_lemma_3_1(const ReproduceOptions&) {
  Stopwatch sw;
  auto params = qarith::DesignParams::make(2, 6, 3, 1, 2);
  const Int bc = qarith::block_count(params).value();
  json factors = json::array();
  for (auto f : factorize(bc.convert_to<std::uint64_t>())) factors.push_back(f);
  const bool holds = bc == 93;
  json outputs{{"params", "2-(6,3,lambda)_2"},
               {"block_count_per_lambda", bc.str()},
               {"factors", factors},
               {"required_group_order_divisor", 93},
               {"holds", holds}};
  return {make_report("lemma-3-1", json{{"t", 2}, {"d", 6}, {"k", 3}, {"q", 2}}, outputs,
                      json::object(), sw.seconds()),
          holds ? 0 : 2};
}

RunResult reproduce_lemma_3_4(const ReproduceOptions&) {
  Stopwatch sw;
  auto params = qarith::DesignParams::make(2, 7, 3, 1, 2);
  const Int bc = qarith::block_count(params).value();
  matgroup::MatGroup singer_normalizer = matgroup::gamma_l1(2, 7);
  const std::uint64_t order = *singer_normalizer.order;
  const bool div = divides(bc, 2 * Int(order));
  const bool holds = bc == 381 && order == 889 && !div;
  json outputs{{"params", "2-(7,3,lambda)_2"},
               {"block_count_per_lambda", bc.str()},
               {"singer_normalizer_order", order},
               {"block_count_divides_2G", div},
               {"holds", holds}};
  return {make_report("lemma-3-4", json{{"t", 2}, {"d", 7}, {"k", 3}, {"q", 2}}, outputs,
                      json::object(), sw.seconds()),
          holds ? 0 : 2};
}

RunResult reproduce_lemma_3_5(const ReproduceOptions& opt) {
  Stopwatch sw;
  matgroup::MatGroup g = matgroup::gamma_l1(2, 11);

  // orbits on 2-spaces first; cheap, and km profiling needs the member index
  matgroup::CensusOptions tcopt;
  tcopt.strategy = matgroup::CensusStrategy::FullScan;
  tcopt.build_member_index = true;
  matgroup::OrbitCensus tc = matgroup::orbit_census(g, 11, 2, tcopt);

  CensusRunOptions copt;
  copt.strategy = matgroup::CensusStrategy::Sampled;
  copt.seed = opt.seed;
  copt.parallelism = opt.parallelism;
  copt.budget_seconds = opt.budget_seconds;
  copt.checkpoint_path = opt.checkpoint_path;
  copt.progress = opt.progress;
  RunResult census_run = run_census(g, 5, copt);
  matgroup::OrbitCensus blocks =
      io::read_census(census_run.report["outputs"]["file"].get<std::string>());

  const Int lambda = 5;
  qarith::DesignParams params = qarith::DesignParams::make(2, 11, 5, lambda, 2);
  const Int expected_bc = qarith::block_count(params).value();
  CensusVerify cv = verify_census_orbits(g, blocks, tc, lambda, expected_bc, true);

  const bool holds = blocks.entries.size() == 157607 &&
                     blocks.certificate() == Int("3548836819") && cv.designs == 0;
  json outputs{{"orbits", blocks.entries.size()},
               {"expected_orbits", 157607},
               {"block_count", expected_bc.str()},
               {"size_filter_candidates", cv.candidates},
               {"design_orbits", cv.designs},
               {"holds", holds}};
  json certificates{{"certificate", blocks.certificate().str()},
                    {"expected", blocks.expected_total.str()},
                    {"t_orbits", tc.entries.size()},
                    {"t_certificate", tc.certificate().str()}};
  json inputs{{"group", g.id}, {"d", 11}, {"k", 5}, {"t", 2}, {"lambda", lambda.str()},
              {"seed", opt.seed}, {"parallelism", opt.parallelism}};
  return {make_report("lemma-3-5", inputs, outputs, certificates, sw.seconds()),
          holds ? 0 : 2};
}

RunResult reproduce_zsigmondy(const ReproduceOptions& opt) {
  Stopwatch sw;
  json values = json::object();
  json exceptions = json::array();
  for (int e = 1; e <= opt.max_e; ++e) {
    Int phi = qarith::primitive_part(2, e);
    values[std::to_string(e)] = phi.str();
    if (phi == 1) exceptions.push_back(e);
  }
  const bool holds = exceptions == json::array({1, 6});
  json outputs{{"primitive_parts", values}, {"exceptions", exceptions}, {"holds", holds}};
  return {make_report("zsigmondy-scan", json{{"q", 2}, {"max_e", opt.max_e}}, outputs,
                      json::object(), sw.seconds()),
          holds ? 0 : 2};
}

RunResult reproduce_singer_scan(const ReproduceOptions&) {
  Stopwatch sw;
  const std::vector<std::pair<long, int>> cases = {{2, 11}, {2, 13}, {2, 19}, {3, 7}, {5, 7}};
  json results = json::object();
  bool holds = true;
  for (auto [p, d] : cases) {
    auto hits = qarith::singer_feasibility_scan(p, d);
    json list = json::array();
    for (const auto& [k, e] : hits) list.push_back({{"k", k}, {"E", e.str()}});
    const std::string key = std::to_string(p) + "^" + std::to_string(d);
    results[key] = list;
    if (p == 2 && d == 11)
      holds = holds && hits.size() == 1 && hits[0].first == 5 && hits[0].second == 5;
    else if (p == 3 && d == 7)
      holds = holds && hits.size() == 1 && hits[0].first == 3 && hits[0].second == 1;
    else
      holds = holds && hits.empty();
  }
  json outputs{{"feasible", results},
               {"expected", {{"2^11", "k=5, E=5"}, {"3^7", "k=3, E=1"}}},
               {"holds", holds}};
  return {make_report("singer-scan", json::object(), outputs, json::object(), sw.seconds()),
          holds ? 0 : 2};
}

}  // namespace

RunResult run_reproduce(const std::string& id, const ReproduceOptions& opt) {
  if (id == "lemma-2-2") return reproduce_lemma_2_2(opt);
  if (id == "lemma-3-1") return reproduce_lemma_3_1(opt);
  if (id == "lemma-3-4") return reproduce_lemma_3_4(opt);
  if (id == "lemma-3-5") return reproduce_lemma_3_5(opt);
  if (id == "zsigmondy-scan") return reproduce_zsigmondy(opt);
  if (id == "singer-scan") return reproduce_singer_scan(opt);
  throw std::invalid_argument("unknown pipeline: " + id);
}

}  // namespace qdesign::pipelines
