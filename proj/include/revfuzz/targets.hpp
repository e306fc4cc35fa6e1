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
// Built-in desk-scale benchmark targets. Each is a pure function of its
// input with a planted, deterministic bug; the interesting ones expose no
// value-dependent control flow, so annotation-aware and baseline fuzzing
// separate measurably.

#ifndef REVFUZZ_TARGETS_HPP_
#define REVFUZZ_TARGETS_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "revfuzz/fuzzer.hpp"
#include "revfuzz/runtime.hpp"

namespace revfuzz {

struct TargetSpec {
  std::string name;
  std::string description;
  std::string bug_condition;
  std::string annotation_sites;
  std::string expected_separation;  // which mode should win
};

namespace target_detail {

// Collects the trace of one execution; drops annotation events when the
// campaign runs annotation-unaware, which keeps baseline behavior invariant
// to the presence of sites.
class TraceBuilder {
 public:
  explicit TraceBuilder(bool annotation_enabled) : ann_(annotation_enabled) {}

  void edge(uint32_t id) { trace_.edges.push_back(id); }

  void emit(uint64_t site, AnnMacro kind, int64_t a,
            std::optional<int64_t> b = std::nullopt) {
    if (!ann_) return;
    trace_.events.push_back(AnnotationEvent{site, kind, a, b});
  }

  void crash(CrashType type, std::vector<uint64_t> stack) {
    trace_.outcome.crashed = true;
    trace_.outcome.type = type;
    trace_.outcome.stack = std::move(stack);
  }

  ExecTrace take() { return std::move(trace_); }

 private:
  bool ann_;
  ExecTrace trace_;
};

}  // namespace target_detail

// ---------------------------------------------------------------------------
// stack_size: a config-string quantity parser feeding a simulated fiber
// start. All non-negative parses share one edge path, so the committed value
// is invisible to coverage; the SET annotation on the commit is the only
// signal that distinguishes values.
// ---------------------------------------------------------------------------

class StackSizeTarget : public Harness {
 public:
  static constexpr uint64_t kSiteStackSize = 101;
  static constexpr uint32_t kEdgeEntry = 1;
  static constexpr uint32_t kEdgeNegative = 2;
  static constexpr uint32_t kEdgeFiberStart = 3;
  static constexpr uint64_t kFrameFiberExecute = 0xF1;
  static constexpr uint64_t kFrameFiberStart = 0xF2;
  static constexpr uint64_t kFrameMain = 0x01;
  // Crash window: a bare decimal literal committing a stack size in
  // [kCrashLow, kCrashHigh) starves the simulated fiber stack. Inputs with a
  // sign, suffix or trailing junk take the page-rounded allocation path and
  // never crash.
  static constexpr int64_t kCrashLow = 512;
  static constexpr int64_t kCrashHigh = 4096;

  std::string name() const override { return "stack_size"; }

  struct ParseResult {
    bool has_digits = false;
    bool negative = false;
    bool clean = false;  // digits only: no sign, no suffix, no junk
    bool junk = false;   // non-fatal warning path
    int64_t value = 0;
  };

  // Leading optional-sign integer with optional K/M/G multiplier; trailing
  // junk is tolerated with a warning.
  static ParseResult parse_quantity(const std::vector<uint8_t>& input) {
    ParseResult r;
    size_t pos = 0;
    bool signed_prefix = false;
    if (pos < input.size() && (input[pos] == '+' || input[pos] == '-')) {
      r.negative = input[pos] == '-';
      signed_prefix = true;
      ++pos;
    }
    int64_t v = 0;
    size_t digits = 0;
    while (pos < input.size() && input[pos] >= '0' && input[pos] <= '9') {
      if (v < (int64_t{1} << 53)) v = v * 10 + (input[pos] - '0');
      ++pos;
      ++digits;
    }
    r.has_digits = digits > 0;
    bool suffix = false;
    if (r.has_digits && pos < input.size()) {
      uint8_t c = input[pos];
      int shift = (c == 'K' || c == 'k') ? 10 : (c == 'M' || c == 'm') ? 20
                  : (c == 'G' || c == 'g') ? 30 : 0;
      if (shift != 0) {
        suffix = true;
        ++pos;
        if (v < (int64_t{1} << 33)) v <<= shift; else v = int64_t{1} << 62;
      }
    }
    r.junk = pos < input.size();
    r.value = v;
    r.clean = r.has_digits && !signed_prefix && !suffix && !r.junk;
    return r;
  }

  ExecTrace execute(const std::vector<uint8_t>& input, bool ann) override {
    target_detail::TraceBuilder t(ann);
    t.edge(kEdgeEntry);
    ParseResult p = parse_quantity(input);
    if (p.has_digits && p.negative) {
      // validation failure path; nothing is committed
      t.edge(kEdgeNegative);
      return t.take();
    }
    if (p.has_digits) {
      // commit the parsed stack size: the one value-bearing probe
      t.emit(kSiteStackSize, AnnMacro::kSet, p.value);
    }
    t.edge(kEdgeFiberStart);
    if (p.clean && p.value >= kCrashLow && p.value < kCrashHigh) {
      t.crash(CrashType::kStackOverflow,
              {kFrameFiberExecute, kFrameFiberStart, kFrameMain});
    }
    return t.take();
  }

  static TargetSpec spec() {
    return {"stack_size",
            "config quantity parser committing a fiber stack size",
            "bare decimal input committing a value in [512, 4096)",
            "SET(site=101, committed value) on commit",
            "annot"};
  }
};

// ---------------------------------------------------------------------------
// maze: U/D/L/R moves on a fixed 15x9 grid; a wall hit or an invalid byte
// ends the run. Reaching the exit cell is the planted bug. Coverage cannot
// see the position; MAX(progress) can.
// ---------------------------------------------------------------------------

class MazeTarget : public Harness {
 public:
  static constexpr uint64_t kSiteProgress = 201;
  static constexpr uint32_t kEdgeEntry = 10;
  static constexpr uint32_t kEdgeStopWall = 11;
  static constexpr uint32_t kEdgeStopInvalid = 12;
  static constexpr uint32_t kEdgeInputEnd = 13;
  static constexpr uint64_t kFrameMazeStep = 0xA1;
  static constexpr uint64_t kFrameMazeRun = 0xA2;
  static constexpr uint64_t kFrameMain = 0x02;
  static constexpr int kWidth = 15;
  static constexpr int kHeight = 9;

  static const char* grid() {
    // 15x9, S=(1,1), E=(13,7); shortest solution RRRDDRRRDDRRRDDRRR
    static const char* g =
        "###############"
        "#S   #       ##"
        "# ## ##### # ##"
        "# ##    #   ###"
        "# ##### ### ###"
        "# ## ##    ####"
        "#  # ##### ####"
        "#### ##  #   E#"
        "###############";
    return g;
  }

  static char cell(int x, int y) {
    if (x < 0 || x >= kWidth || y < 0 || y >= kHeight) return '#';
    return grid()[y * kWidth + x];
  }

  std::string name() const override { return "maze"; }

  ExecTrace execute(const std::vector<uint8_t>& input, bool ann) override {
    target_detail::TraceBuilder t(ann);
    t.edge(kEdgeEntry);
    int x = 1, y = 1;
    for (uint8_t b : input) {
      int dx = 0, dy = 0;
      switch (b) {
        case 'U': dy = -1; break;
        case 'D': dy = 1; break;
        case 'L': dx = -1; break;
        case 'R': dx = 1; break;
        default:
          t.edge(kEdgeStopInvalid);
          return t.take();
      }
      int nx = x + dx, ny = y + dy;
      if (cell(nx, ny) == '#') {
        t.edge(kEdgeStopWall);
        return t.take();
      }
      x = nx;
      y = ny;
      t.emit(kSiteProgress, AnnMacro::kMax, x + y * kWidth);
      if (cell(x, y) == 'E') {
        t.crash(CrashType::kAssert, {kFrameMazeStep, kFrameMazeRun, kFrameMain});
        return t.take();
      }
    }
    t.edge(kEdgeInputEnd);
    return t.take();
  }

  static TargetSpec spec() {
    return {"maze",
            "move interpreter on a fixed 15x9 grid, run ends on wall hit",
            "reaching the exit cell",
            "MAX(site=201, x + y*width) per step",
            "annot"};
  }
};

// ---------------------------------------------------------------------------
// magic: sanity control. Byte-wise comparison edges make the magic prefix
// incrementally discoverable by plain coverage, so both modes find it.
// ---------------------------------------------------------------------------

class MagicTarget : public Harness {
 public:
  static constexpr uint32_t kEdgeEntry = 20;
  static constexpr uint32_t kEdgeByte0 = 21;  // .. 24 for bytes 0..3
  static constexpr uint64_t kFrameMagicCheck = 0xB1;
  static constexpr uint64_t kFrameMain = 0x03;

  static const std::vector<uint8_t>& magic() {
    static const std::vector<uint8_t> m = {'F', 'z', '0', '!'};
    return m;
  }

  std::string name() const override { return "magic"; }

  ExecTrace execute(const std::vector<uint8_t>& input, bool ann) override {
    target_detail::TraceBuilder t(ann);
    t.edge(kEdgeEntry);
    const auto& m = magic();
    if (input.size() < m.size()) return t.take();
    for (size_t i = 0; i < m.size(); ++i) {
      if (input[i] != m[i]) return t.take();
      t.edge(kEdgeByte0 + static_cast<uint32_t>(i));
    }
    t.crash(CrashType::kAbort, {kFrameMagicCheck, kFrameMain});
    return t.take();
  }

  static TargetSpec spec() {
    return {"magic",
            "4-byte magic prefix gate with per-byte comparison edges",
            "input starting with the magic bytes",
            "none",
            "both"};
  }
};

// ---------------------------------------------------------------------------
// state_machine: six commands must arrive in order; any wrong command resets
// to the start. Advance/reset edges carry no depth information beyond
// hitcount buckets, while STATE exposes each newly reached depth.
// ---------------------------------------------------------------------------

class StateMachineTarget : public Harness {
 public:
  static constexpr uint64_t kSiteProto = 301;
  static constexpr uint32_t kEdgeEntry = 30;
  static constexpr uint32_t kEdgeAdvance = 31;
  static constexpr uint32_t kEdgeReset = 32;
  static constexpr uint64_t kFrameProtoFinal = 0xC1;
  static constexpr uint64_t kFrameProtoStep = 0xC2;
  static constexpr uint64_t kFrameMain = 0x04;

  static const std::vector<uint8_t>& commands() {
    static const std::vector<uint8_t> c = {'S', 'Y', 'N', 'A', 'C', 'K'};
    return c;
  }

  std::string name() const override { return "state_machine"; }

  ExecTrace execute(const std::vector<uint8_t>& input, bool ann) override {
    target_detail::TraceBuilder t(ann);
    t.edge(kEdgeEntry);
    const auto& cmds = commands();
    int state = 0;
    int deepest = 0;
    for (uint8_t b : input) {
      if (b == cmds[static_cast<size_t>(state)]) {
        ++state;
        t.edge(kEdgeAdvance);
        if (state > deepest) {
          deepest = state;
          t.emit(kSiteProto, AnnMacro::kState, state);
        }
        if (state == static_cast<int>(cmds.size())) {
          t.crash(CrashType::kSegv, {kFrameProtoFinal, kFrameProtoStep, kFrameMain});
          return t.take();
        }
      } else {
        state = 0;
        t.edge(kEdgeReset);
      }
    }
    return t.take();
  }

  static TargetSpec spec() {
    return {"state_machine",
            "six-command handshake advancing a protocol state in order",
            "completing the full command sequence",
            "STATE(site=301, state) on each newly reached depth",
            "annot"};
  }
};

inline std::unique_ptr<Harness> make_target(const std::string& name) {
  if (name == "stack_size") return std::make_unique<StackSizeTarget>();
  if (name == "maze") return std::make_unique<MazeTarget>();
  if (name == "magic") return std::make_unique<MagicTarget>();
  if (name == "state_machine") return std::make_unique<StateMachineTarget>();
  return nullptr;
}

inline std::vector<TargetSpec> all_target_specs() {
  return {StackSizeTarget::spec(), MazeTarget::spec(), MagicTarget::spec(),
          StateMachineTarget::spec()};
}

}  // namespace revfuzz

#endif  // REVFUZZ_TARGETS_HPP_
