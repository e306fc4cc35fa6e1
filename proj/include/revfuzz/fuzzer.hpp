// Copyright 2026 The RevFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Greybox loop with dual-map feedback. Runs either annotation-aware
// (annotation events are first-class feedback) or baseline (events
// suppressed at the harness boundary), which is the comparison axis of the
// benchmark targets.

#ifndef REVFUZZ_FUZZER_HPP_
#define REVFUZZ_FUZZER_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "revfuzz/common.hpp"
#include "revfuzz/runtime.hpp"

namespace revfuzz {

enum class CrashType : uint8_t { kSegv, kAbort, kStackOverflow, kAssert };

inline const char* to_string(CrashType t) {
  switch (t) {
    case CrashType::kSegv: return "segv";
    case CrashType::kAbort: return "abort";
    case CrashType::kStackOverflow: return "stack_overflow";
    case CrashType::kAssert: return "assert";
  }
  return "?";
}

inline std::optional<CrashType> crash_type_from_string(std::string_view s) {
  if (s == "segv") return CrashType::kSegv;
  if (s == "abort") return CrashType::kAbort;
  if (s == "stack_overflow") return CrashType::kStackOverflow;
  if (s == "assert") return CrashType::kAssert;
  return std::nullopt;
}

struct ExecOutcome {
  bool crashed = false;
  CrashType type = CrashType::kSegv;
  std::vector<uint64_t> stack;  // innermost frame first
};

struct ExecTrace {
  std::vector<uint32_t> edges;
  std::vector<AnnotationEvent> events;
  ExecOutcome outcome;
};

// Execution boundary: runs one input against a target and reports edges,
// annotation events and the outcome. Implementations must be deterministic
// for a fixed input, and must emit no annotation events when
// annotation_enabled is false.
class Harness {
 public:
  virtual ~Harness() = default;
  virtual std::string name() const = 0;
  virtual ExecTrace execute(const std::vector<uint8_t>& input,
                            bool annotation_enabled) = 0;
};

// Dedup key is (crash type, hash of the top 3 stack frames).
inline uint64_t stack_hash(const std::vector<uint64_t>& frames) {
  uint64_t h = kFnvOffsetBasis;
  size_t n = std::min<size_t>(frames.size(), 3);
  for (size_t i = 0; i < n; ++i) {
    for (int b = 0; b < 8; ++b) {
      h ^= (frames[i] >> (8 * b)) & 0xFF;
      h *= kFnvPrime;
    }
  }
  return h;
}

struct CrashRecord {
  std::vector<uint8_t> input;
  CrashType type = CrashType::kSegv;
  uint64_t stack_hash = 0;
  uint64_t first_seen_exec = 0;
};

// Groups by (type, stack_hash), keeping the earliest representative.
inline std::vector<CrashRecord> dedup_crashes(const std::vector<CrashRecord>& crashes) {
  std::map<std::pair<uint8_t, uint64_t>, CrashRecord> by_key;
  for (const auto& c : crashes) {
    auto key = std::make_pair(static_cast<uint8_t>(c.type), c.stack_hash);
    auto it = by_key.find(key);
    if (it == by_key.end() || c.first_seen_exec < it->second.first_seen_exec) {
      by_key[key] = c;
    }
  }
  std::vector<CrashRecord> out;
  out.reserve(by_key.size());
  for (auto& [k, v] : by_key) out.push_back(std::move(v));
  std::sort(out.begin(), out.end(), [](const CrashRecord& a, const CrashRecord& b) {
    return a.first_seen_exec < b.first_seen_exec;
  });
  return out;
}

enum class SeedOrigin : uint8_t { kInitial, kMutation };

struct Seed {
  std::vector<uint8_t> input;
  uint64_t exec_us = 1;
  SeedOrigin found_by = SeedOrigin::kInitial;
  std::optional<size_t> parent;
  NoveltySource novelty_source = NoveltySource::kEdge;
};

struct CampaignParams {
  uint64_t budget_execs = 0;
  std::optional<uint64_t> budget_wall_ms;  // optional wall clock cap (not bit-reproducible)
  uint64_t rng_seed = 0;
  bool annotation_enabled = true;
  bool stop_on_first_crash = false;
  size_t max_input_len = 4096;
  int energy_base = 32;
};

struct CampaignReport {
  std::string target;
  std::string mode;  // "annot" | "baseline"
  uint64_t rng_seed = 0;
  uint64_t budget_execs = 0;
  uint64_t total_execs = 0;
  size_t corpus_size = 0;
  std::vector<CrashRecord> crashes;  // deduped, by first_seen_exec
  bool replay_ok = true;
};

// ---------------------------------------------------------------------------
// Havoc mutation: 1..64 stacked operations drawn from a fixed op set.
// ---------------------------------------------------------------------------

namespace detail {

inline uint64_t rand_below(std::mt19937_64& rng, uint64_t n) {
  return n == 0 ? 0 : rng() % n;
}

inline constexpr int64_t kInterestingValues[] = {
    0, 1, -1, 127, 128, 255, 32767, 32769, 2147483647ll, 2147483649ll};

}  // namespace detail

inline std::vector<uint8_t> mutate(const std::vector<uint8_t>& input,
                                   std::mt19937_64& rng,
                                   const std::vector<Seed>& corpus,
                                   size_t max_len) {
  using detail::rand_below;
  std::vector<uint8_t> buf = input;
  int ops = 1 << rand_below(rng, 7);  // 1..64 stacked
  for (int op = 0; op < ops; ++op) {
    switch (rand_below(rng, 8)) {
      case 0: {  // bit flip
        if (buf.empty()) break;
        size_t off = rand_below(rng, buf.size());
        buf[off] ^= static_cast<uint8_t>(1u << rand_below(rng, 8));
        break;
      }
      case 1: {  // byte set
        if (buf.empty()) break;
        buf[rand_below(rng, buf.size())] = static_cast<uint8_t>(rand_below(rng, 256));
        break;
      }
      case 2: {  // random byte xor
        if (buf.empty()) break;
        buf[rand_below(rng, buf.size())] ^=
            static_cast<uint8_t>(1 + rand_below(rng, 255));
        break;
      }
      case 3: {  // add/sub +-35 on a 1/2/4-byte little-endian word
        static const size_t widths[] = {1, 2, 4};
        size_t w = widths[rand_below(rng, 3)];
        if (buf.size() < w) break;
        size_t off = rand_below(rng, buf.size() - w + 1);
        int64_t delta = static_cast<int64_t>(rand_below(rng, 70)) - 35;
        if (delta == 0) delta = 1;
        uint64_t v = 0;
        for (size_t i = 0; i < w; ++i) v |= static_cast<uint64_t>(buf[off + i]) << (8 * i);
        v = static_cast<uint64_t>(static_cast<int64_t>(v) + delta);
        for (size_t i = 0; i < w; ++i) buf[off + i] = static_cast<uint8_t>(v >> (8 * i));
        break;
      }
      case 4: {  // chunk delete
        if (buf.size() < 2) break;
        size_t off = rand_below(rng, buf.size());
        size_t len = 1 + rand_below(rng, buf.size() - off);
        buf.erase(buf.begin() + static_cast<ptrdiff_t>(off),
                  buf.begin() + static_cast<ptrdiff_t>(off + len));
        break;
      }
      case 5: {  // chunk duplicate
        if (buf.empty() || buf.size() >= max_len) break;
        size_t off = rand_below(rng, buf.size());
        size_t len = 1 + rand_below(rng, buf.size() - off);
        len = std::min(len, max_len - buf.size());
        if (len == 0) break;
        std::vector<uint8_t> chunk(buf.begin() + static_cast<ptrdiff_t>(off),
                                   buf.begin() + static_cast<ptrdiff_t>(off + len));
        size_t at = rand_below(rng, buf.size() + 1);
        buf.insert(buf.begin() + static_cast<ptrdiff_t>(at), chunk.begin(), chunk.end());
        break;
      }
      case 6: {  // splice: our prefix + suffix of a random corpus member
        if (corpus.empty()) break;
        const auto& other = corpus[rand_below(rng, corpus.size())].input;
        if (other.empty()) break;
        size_t pre = buf.empty() ? 0 : rand_below(rng, buf.size() + 1);
        size_t cut = rand_below(rng, other.size());
        std::vector<uint8_t> next(buf.begin(), buf.begin() + static_cast<ptrdiff_t>(pre));
        next.insert(next.end(), other.begin() + static_cast<ptrdiff_t>(cut), other.end());
        if (next.size() > max_len) next.resize(max_len);
        buf = std::move(next);
        break;
      }
      case 7: {  // interesting-value substitution
        int64_t v = detail::kInterestingValues[rand_below(
            rng, std::size(detail::kInterestingValues))];
        size_t w = (v >= -128 && v <= 255) ? 1 : (v >= -32768 && v <= 65535) ? 2 : 4;
        if (buf.size() < w) break;
        size_t off = rand_below(rng, buf.size() - w + 1);
        auto u = static_cast<uint64_t>(v);
        for (size_t i = 0; i < w; ++i) buf[off + i] = static_cast<uint8_t>(u >> (8 * i));
        break;
      }
    }
  }
  if (buf.empty()) buf.push_back(static_cast<uint8_t>(detail::rand_below(rng, 256)));
  if (buf.size() > max_len) buf.resize(max_len);
  return buf;
}

// ---------------------------------------------------------------------------
// Campaign loop.
// ---------------------------------------------------------------------------

class Campaign {
 public:
  Campaign(Harness& harness, CampaignParams params)
      : harness_(harness), params_(params), rng_(params.rng_seed) {}

  CampaignReport run(const std::vector<std::vector<uint8_t>>& initial_seeds) {
    if (initial_seeds.empty()) throw FatalError("campaign requires at least one seed");
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& s : initial_seeds) {
      Seed seed;
      seed.input = s;
      if (seed.input.size() > params_.max_input_len) seed.input.resize(params_.max_input_len);
      seed.found_by = SeedOrigin::kInitial;
      corpus_.push_back(std::move(seed));
    }

    bool done = false;
    // Initial seeds are executed first (consuming budget) to prime the
    // campaign maps; they stay in the corpus either way.
    for (size_t i = 0; i < corpus_.size() && !done; ++i) {
      if (out_of_budget(t0)) break;
      done = run_one(corpus_[i].input, std::nullopt, &corpus_[i]);
    }

    size_t cursor = 0;
    while (!done && !out_of_budget(t0)) {
      Seed& seed = corpus_[cursor % corpus_.size()];
      size_t seed_index = cursor % corpus_.size();
      ++cursor;
      int energy = params_.energy_base;
      if (params_.annotation_enabled &&
          (seed.novelty_source == NoveltySource::kAnnotation ||
           seed.novelty_source == NoveltySource::kBoth)) {
        energy *= 2;
      }
      for (int trial = 0; trial < energy; ++trial) {
        if (out_of_budget(t0)) break;
        std::vector<uint8_t> input =
            mutate(corpus_[seed_index].input, rng_, corpus_, params_.max_input_len);
        if (run_one(input, seed_index, nullptr)) {
          done = true;
          break;
        }
      }
    }

    CampaignReport report;
    report.target = harness_.name();
    report.mode = params_.annotation_enabled ? "annot" : "baseline";
    report.rng_seed = params_.rng_seed;
    report.budget_execs = params_.budget_execs;
    report.total_execs = execs_;
    report.corpus_size = corpus_.size();
    report.crashes = dedup_crashes(crashes_);
    report.replay_ok = replay_all(report.crashes);
    return report;
  }

 private:
  bool out_of_budget(std::chrono::steady_clock::time_point t0) const {
    if (execs_ >= params_.budget_execs) return true;
    if (params_.budget_wall_ms) {
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
      if (static_cast<uint64_t>(ms) >= *params_.budget_wall_ms) return true;
    }
    return false;
  }

  // Returns true when the campaign should stop (stop_on_first_crash hit).
  bool run_one(const std::vector<uint8_t>& input, std::optional<size_t> parent,
               Seed* existing_seed) {
    feedback_.begin_execution();
    auto us0 = std::chrono::steady_clock::now();
    ExecTrace trace = harness_.execute(input, params_.annotation_enabled);
    ++execs_;
    for (uint32_t e : trace.edges) feedback_.record_edge(e);
    for (const auto& ev : trace.events) feedback_.apply_event(ev);
    NoveltySource source = NoveltySource::kNone;
    bool interesting = feedback_.is_interesting(&source);
    auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                  std::chrono::steady_clock::now() - us0)
                  .count();
    uint64_t exec_us = us > 0 ? static_cast<uint64_t>(us) : 1;

    if (existing_seed != nullptr) {
      existing_seed->exec_us = exec_us;
      if (interesting) existing_seed->novelty_source = source;
    }
    if (trace.outcome.crashed) {
      CrashRecord c;
      c.input = input;
      c.type = trace.outcome.type;
      c.stack_hash = stack_hash(trace.outcome.stack);
      c.first_seen_exec = execs_;
      crashes_.push_back(std::move(c));
      return params_.stop_on_first_crash;
    }
    if (interesting && existing_seed == nullptr) {
      Seed seed;
      seed.input = input;
      seed.exec_us = exec_us;
      seed.found_by = SeedOrigin::kMutation;
      seed.parent = parent;
      seed.novelty_source = source;
      corpus_.push_back(std::move(seed));
    }
    return false;
  }

  // Every reported crash input must reproduce the same (type, stack hash).
  bool replay_all(const std::vector<CrashRecord>& crashes) {
    for (const auto& c : crashes) {
      ExecTrace t = harness_.execute(c.input, params_.annotation_enabled);
      if (!t.outcome.crashed || t.outcome.type != c.type ||
          stack_hash(t.outcome.stack) != c.stack_hash) {
        return false;
      }
    }
    return true;
  }

  Harness& harness_;
  CampaignParams params_;
  std::mt19937_64 rng_;
  FeedbackState feedback_;
  std::vector<Seed> corpus_;
  std::vector<CrashRecord> crashes_;
  uint64_t execs_ = 0;
};

inline CampaignReport run_campaign(Harness& harness, const CampaignParams& params,
                                   const std::vector<std::vector<uint8_t>>& seeds) {
  Campaign c(harness, params);
  return c.run(seeds);
}

// ---------------------------------------------------------------------------
// Report serialization. u64 values that can exceed 2^53 go as hex strings.
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const CampaignReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "campaign_report";
  j["target"] = r.target;
  j["mode"] = r.mode;
  j["rng_seed"] = r.rng_seed;
  j["budget_execs"] = r.budget_execs;
  j["total_execs"] = r.total_execs;
  j["corpus_size"] = r.corpus_size;
  j["replay_ok"] = r.replay_ok;
  nlohmann::json crashes = nlohmann::json::array();
  for (const auto& c : r.crashes) {
    char hh[17];
    std::snprintf(hh, sizeof hh, "%016llx", static_cast<unsigned long long>(c.stack_hash));
    crashes.push_back({{"first_seen_exec", c.first_seen_exec},
                       {"input_hex", hex_encode(c.input)},
                       {"stack_hash", std::string(hh)},
                       {"type", to_string(c.type)}});
  }
  j["crashes"] = crashes;
  return j;
}

inline CampaignReport report_from_json(const nlohmann::json& j) {
  CampaignReport r;
  r.target = j.at("target").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.rng_seed = j.at("rng_seed").get<uint64_t>();
  r.budget_execs = j.at("budget_execs").get<uint64_t>();
  r.total_execs = j.at("total_execs").get<uint64_t>();
  r.corpus_size = j.at("corpus_size").get<size_t>();
  r.replay_ok = j.at("replay_ok").get<bool>();
  for (const auto& cj : j.at("crashes")) {
    CrashRecord c;
    c.first_seen_exec = cj.at("first_seen_exec").get<uint64_t>();
    c.input = hex_decode(cj.at("input_hex").get<std::string>());
    c.stack_hash = std::stoull(cj.at("stack_hash").get<std::string>(), nullptr, 16);
    auto t = crash_type_from_string(cj.at("type").get<std::string>());
    if (!t) throw FatalError("bad crash type in report");
    c.type = *t;
    r.crashes.push_back(std::move(c));
  }
  return r;
}

}  // namespace revfuzz

#endif  // REVFUZZ_FUZZER_HPP_
