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
// Executable semantics of the annotation primitives and the dual-map
// feedback state: a conventional edge-coverage map plus a dedicated
// annotation map, so annotation signals never collide with edges and an
// execution can be interesting even when coverage does not grow.

#ifndef REVFUZZ_RUNTIME_HPP_
#define REVFUZZ_RUNTIME_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "revfuzz/common.hpp"

namespace revfuzz {

// The annotation primitive set. SET/INC mark value classes, MAX/MIN/DIST/BITS
// reward monotonic progress, STATE/CTX fold execution phase into the slot
// hashing of subsequent marks.
enum class AnnMacro : uint8_t {
  kSet, kMax, kMin, kInc, kDist, kBits, kState, kCtx,
};

inline const char* to_string(AnnMacro m) {
  switch (m) {
    case AnnMacro::kSet: return "SET";
    case AnnMacro::kMax: return "MAX";
    case AnnMacro::kMin: return "MIN";
    case AnnMacro::kInc: return "INC";
    case AnnMacro::kDist: return "DIST";
    case AnnMacro::kBits: return "BITS";
    case AnnMacro::kState: return "STATE";
    case AnnMacro::kCtx: return "CTX";
  }
  return "?";
}

inline std::optional<AnnMacro> ann_macro_from_string(std::string_view s) {
  if (s == "SET") return AnnMacro::kSet;
  if (s == "MAX") return AnnMacro::kMax;
  if (s == "MIN") return AnnMacro::kMin;
  if (s == "INC") return AnnMacro::kInc;
  if (s == "DIST") return AnnMacro::kDist;
  if (s == "BITS") return AnnMacro::kBits;
  if (s == "STATE") return AnnMacro::kState;
  if (s == "CTX") return AnnMacro::kCtx;
  return std::nullopt;
}

// One annotation firing. `b` is present only for DIST.
struct AnnotationEvent {
  uint64_t site_id = 0;
  AnnMacro kind = AnnMacro::kSet;
  int64_t a = 0;
  std::optional<int64_t> b;
};

inline constexpr size_t kMapSize = 65536;  // power of two
inline constexpr size_t kMaxRegs = 512;

// AFL-style hitcount bucketing: {0},{1},{2},{3},{4-7},{8-15},{16-31},
// {32-127},{128-255} -> classes 0..8.
inline uint8_t bucket(uint8_t hitcount) {
  if (hitcount == 0) return 0;
  if (hitcount == 1) return 1;
  if (hitcount == 2) return 2;
  if (hitcount == 3) return 3;
  if (hitcount <= 7) return 4;
  if (hitcount <= 15) return 5;
  if (hitcount <= 31) return 6;
  if (hitcount <= 127) return 7;
  return 8;
}

// Which map produced the novelty of an execution.
enum class NoveltySource : uint8_t { kNone, kEdge, kAnnotation, kBoth };

inline const char* to_string(NoveltySource s) {
  switch (s) {
    case NoveltySource::kNone: return "none";
    case NoveltySource::kEdge: return "edge";
    case NoveltySource::kAnnotation: return "annotation";
    case NoveltySource::kBoth: return "both";
  }
  return "?";
}

// Per-campaign feedback state. The trace maps are per-execution (cleared by
// begin_execution), the campaign class maps and max registers persist for the
// whole campaign. state_reg/ctx_reg reset to 0 at execution start.
class FeedbackState {
 public:
  FeedbackState() {
    edge_trace_.fill(0);
    annot_trace_.fill(0);
    edge_campaign_.fill(0);
    annot_campaign_.fill(0);
  }

  void begin_execution() {
    for (uint32_t slot : edge_touched_) edge_trace_[slot] = 0;
    for (uint32_t slot : annot_touched_) annot_trace_[slot] = 0;
    edge_touched_.clear();
    annot_touched_.clear();
    state_reg_ = 0;
    ctx_reg_ = 0;
    max_improved_this_exec_ = false;
  }

  // Edge coverage path. Annotation events never touch this map.
  void record_edge(uint32_t edge_id) {
    uint32_t slot = edge_id % kMapSize;
    if (edge_trace_[slot] == 0) edge_touched_.push_back(slot);
    if (edge_trace_[slot] < 255) ++edge_trace_[slot];
  }

  // Applies one annotation event; returns whether the event itself was novel
  // campaign-wide. Edge state is never written here.
  bool apply_event(const AnnotationEvent& e) {
    switch (e.kind) {
      case AnnMacro::kSet:
      case AnnMacro::kInc:
        return mark_value(e.site_id, e.a);
      case AnnMacro::kMax:
        return track_extremum(e.site_id, e.a);
      case AnnMacro::kMin:
        return track_extremum(e.site_id, -e.a);
      case AnnMacro::kDist: {
        int64_t d = e.a - e.b.value_or(0);
        if (d < 0) d = -d;
        return track_extremum(e.site_id, -d);
      }
      case AnnMacro::kBits:
        return track_extremum(
            e.site_id,
            static_cast<int64_t>(std::popcount(static_cast<uint64_t>(e.a))));
      case AnnMacro::kState: {
        state_reg_ = fnv1a64_fields({state_reg_, e.site_id, static_cast<uint64_t>(e.a)});
        return mark_value(e.site_id, e.a);
      }
      case AnnMacro::kCtx:
        ctx_reg_ = static_cast<uint64_t>(e.a);
        return false;
    }
    return false;
  }

  // Finalizes one execution: true iff any edge or annotation slot attained a
  // bucket class never seen campaign-wide, or a max register improved.
  // Campaign maps are updated when the execution is interesting.
  bool is_interesting(NoveltySource* source = nullptr) {
    bool edge_novel = false;
    bool annot_novel = false;
    for (uint32_t slot : edge_touched_) {
      if (bucket(edge_trace_[slot]) > edge_campaign_[slot]) {
        edge_novel = true;
        break;
      }
    }
    for (uint32_t slot : annot_touched_) {
      if (bucket(annot_trace_[slot]) > annot_campaign_[slot]) {
        annot_novel = true;
        break;
      }
    }
    annot_novel = annot_novel || max_improved_this_exec_;
    bool interesting = edge_novel || annot_novel;
    if (interesting) {
      for (uint32_t slot : edge_touched_) {
        uint8_t cls = bucket(edge_trace_[slot]);
        if (cls > edge_campaign_[slot]) edge_campaign_[slot] = cls;
      }
      for (uint32_t slot : annot_touched_) {
        uint8_t cls = bucket(annot_trace_[slot]);
        if (cls > annot_campaign_[slot]) annot_campaign_[slot] = cls;
      }
    }
    if (source != nullptr) {
      *source = !interesting ? NoveltySource::kNone
                : (edge_novel && annot_novel) ? NoveltySource::kBoth
                : edge_novel ? NoveltySource::kEdge
                             : NoveltySource::kAnnotation;
    }
    return interesting;
  }

  // Slot for a SET/INC mark: FNV-1a 64 over the little-endian encoding of
  // (ctx ^ state, site, value), reduced mod the map size.
  uint32_t value_slot(uint64_t site_id, int64_t value) const {
    return static_cast<uint32_t>(
        fnv1a64_fields({ctx_reg_ ^ state_reg_, site_id, static_cast<uint64_t>(value)}) %
        kMapSize);
  }

  uint64_t state_reg() const { return state_reg_; }
  uint64_t ctx_reg() const { return ctx_reg_; }

  struct MaxReg {
    bool seen = false;
    int64_t value = 0;
  };
  const MaxReg& max_reg(uint64_t site_id) const { return max_regs_[site_id % kMaxRegs]; }

  uint8_t edge_trace_at(uint32_t slot) const { return edge_trace_[slot % kMapSize]; }
  uint8_t annot_trace_at(uint32_t slot) const { return annot_trace_[slot % kMapSize]; }
  uint8_t edge_campaign_at(uint32_t slot) const { return edge_campaign_[slot % kMapSize]; }
  uint8_t annot_campaign_at(uint32_t slot) const { return annot_campaign_[slot % kMapSize]; }
  const std::vector<uint32_t>& edge_touched() const { return edge_touched_; }
  const std::vector<uint32_t>& annot_touched() const { return annot_touched_; }

 private:
  bool mark_value(uint64_t site_id, int64_t value) {
    uint32_t slot = value_slot(site_id, value);
    if (annot_trace_[slot] == 0) annot_touched_.push_back(slot);
    if (annot_trace_[slot] < 255) ++annot_trace_[slot];
    return bucket(annot_trace_[slot]) > annot_campaign_[slot];
  }

  // MAX family. The stored extremum is campaign-scoped and non-decreasing;
  // a magnitude-class SET is emitted alongside so the map also reflects the
  // order of magnitude reached.
  bool track_extremum(uint64_t site_id, int64_t value) {
    MaxReg& reg = max_regs_[site_id % kMaxRegs];
    bool improved = !reg.seen || value > reg.value;
    if (improved) {
      reg.seen = true;
      reg.value = value;
      max_improved_this_exec_ = true;
    }
    int64_t mag = value > 1 ? value : 1;
    int64_t cls = 63 - std::countl_zero(static_cast<uint64_t>(mag));  // floor(log2)
    mark_value(site_id, cls);
    return improved;
  }

  std::array<uint8_t, kMapSize> edge_trace_;
  std::array<uint8_t, kMapSize> annot_trace_;
  std::array<uint8_t, kMapSize> edge_campaign_;   // best bucket class per slot
  std::array<uint8_t, kMapSize> annot_campaign_;  // best bucket class per slot
  std::vector<uint32_t> edge_touched_;
  std::vector<uint32_t> annot_touched_;
  std::array<MaxReg, kMaxRegs> max_regs_{};
  uint64_t state_reg_ = 0;
  uint64_t ctx_reg_ = 0;
  bool max_improved_this_exec_ = false;
};

}  // namespace revfuzz

#endif  // REVFUZZ_RUNTIME_HPP_
