#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "streamad/sdr.hpp"

namespace streamad {

struct TmConfig {
  uint32_t column_count = 2048;
  uint32_t cells_per_column = 32;
  // Connected-synapse matches needed to make a segment active, and potential
  // matches needed to consider it for learning.
  uint32_t activation_threshold = 13;
  uint32_t min_threshold = 10;
  float initial_permanence = 0.21f;
  float connected_permanence = 0.50f;
  float permanence_increment = 0.10f;
  float permanence_decrement = 0.10f;
  float predicted_decrement = 0.004f;
  uint32_t max_segments_per_cell = 128;
  uint32_t max_synapses_per_segment = 128;
  uint32_t new_synapse_count = 20;
  uint64_t seed = 1;

  void validate() const;
  uint64_t cell_count() const {
    return uint64_t{column_count} * cells_per_column;
  }
};

/// Fixed random projection from encoder space onto column space, standing in
/// for a spatial pooler. Each column owns a seeded random half of the input
/// bits; an input activates the top-k columns by pool overlap (k ~ 2% of the
/// columns), ties going to the lower column index. Deterministic for a given
/// (seed, input_width, column_count).
class ColumnProjector {
 public:
  ColumnProjector(uint32_t input_width, uint32_t column_count, uint64_t seed);

  /// Top-k column code for the encoding. An empty encoding yields an empty
  /// code. Throws std::invalid_argument on width mismatch.
  Sdr project(const Sdr& encoding) const;

  uint32_t input_width() const { return input_width_; }
  uint32_t column_count() const { return column_count_; }
  uint32_t active_column_count() const { return k_; }

 private:
  uint32_t input_width_;
  uint32_t column_count_;
  uint32_t k_;
  std::vector<std::vector<uint32_t>> columns_of_bit_;
};

/// Online sequence memory over column codes. Per step it consumes the active
/// column set, learns the transition from the previous step, and returns the
/// column-level prediction for the next step. Cells within a column carry
/// sequence context: a column's cells hold distal segments whose synapses
/// target previously-active cells, so the same input can lead to different
/// predictions depending on the sequence it arrived through.
///
/// Single-owner mutable: advance one instance from one thread at a time.
class TemporalMemory {
 public:
  explicit TemporalMemory(TmConfig cfg);

  struct StepResult {
    Sdr active_columns;   // a_t, echo of the input code
    Sdr predicted_next;   // column-level prediction for t+1
  };

  /// Advances one step. When learn is true, reinforces segments that
  /// predicted correctly, punishes segments whose prediction did not come
  /// true, and grows segments on bursting columns' winner cells targeting
  /// the previous winner cells.
  StepResult step(const Sdr& active_columns, bool learn);

  /// Sequence boundary: clears active/winner/predictive state. Learned
  /// segments are retained. Idempotent.
  void reset();

  const TmConfig& config() const { return cfg_; }
  const std::vector<uint32_t>& predictive_cells() const {
    return predictive_cells_;
  }
  size_t segment_count() const { return live_segments_; }
  size_t synapse_count() const { return live_synapses_; }
  std::vector<float> all_permanences() const;

  /// Versioned JSON dump of the learned state for pause-resume. The format
  /// is documented in the README and is not stable across versions.
  std::string save_state() const;
  static TemporalMemory load_state(const std::string& json_text);

 private:
  // Pool slots carry a generation counter instead of an alive flag: even
  // while live, bumped to odd on destroy and back to even on reuse. Index
  // entries remember the generation they were created under, so a mismatch
  // marks them stale.
  struct Synapse {
    uint32_t segment = 0;
    uint32_t presyn = 0;
    float permanence = 0.0f;
    uint32_t gen = 0;
  };
  struct Segment {
    uint32_t cell = 0;
    uint32_t gen = 0;
    uint64_t last_used = 0;
    std::vector<uint32_t> synapses;
    // Stamped per-pass counters; valid only when the stamp equals the id of
    // the most recent dendrite pass.
    uint64_t active_stamp = 0;
    uint64_t potential_stamp = 0;
    uint32_t connected_count = 0;
    uint32_t potential_count = 0;
  };
  struct IndexEntry {
    uint32_t synapse;
    uint32_t gen;
  };

  uint32_t create_segment(uint32_t cell);
  void destroy_segment(uint32_t seg_id);
  void destroy_synapse(uint32_t syn_id);
  void grow_synapses(uint32_t seg_id, uint32_t desired);
  void adapt_segment(uint32_t seg_id, float active_delta, float inactive_delta);
  void punish_segment(uint32_t seg_id);
  void dendrite_pass();
  bool prev_cell_active(uint32_t cell) const;
  uint32_t potential_matches(const Segment& s) const;

  TmConfig cfg_;
  std::mt19937_64 rng_;
  uint64_t step_ = 0;

  std::vector<Segment> segments_;
  std::vector<uint32_t> free_segments_;
  std::vector<Synapse> synapses_;
  std::vector<uint32_t> free_synapses_;
  std::vector<std::vector<uint32_t>> cell_segments_;
  std::vector<std::vector<IndexEntry>> synapses_of_presyn_;
  size_t live_segments_ = 0;
  size_t live_synapses_ = 0;

  std::vector<uint32_t> prev_active_cells_;
  std::vector<uint32_t> prev_winner_cells_;
  std::vector<uint64_t> cell_stamp_;
  uint64_t cell_pass_ = 0;       // stamp value of the current active set
  uint64_t valid_cell_pass_ = 0; // 0 after reset: no previous actives

  uint64_t dendrite_counter_ = 0;
  uint64_t last_pass_ = 0;       // 0 after reset: no valid counts
  std::vector<uint32_t> predictive_cells_;
  std::vector<uint32_t> active_segment_list_;
  std::vector<uint32_t> matching_segment_list_;
};

}  // namespace streamad
