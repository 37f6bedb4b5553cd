#include "streamad/temporal_memory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "streamad/hashing.hpp"

namespace streamad {

void TmConfig::validate() const {
  if (column_count == 0 || cells_per_column == 0) {
    throw std::invalid_argument("tm: column_count and cells_per_column > 0");
  }
  if (min_threshold > activation_threshold) {
    throw std::invalid_argument("tm: min_threshold <= activation_threshold");
  }
  auto in_unit = [](float v) { return v >= 0.0f && v <= 1.0f; };
  if (!in_unit(initial_permanence) || !in_unit(connected_permanence) ||
      !in_unit(permanence_increment) || !in_unit(permanence_decrement) ||
      !in_unit(predicted_decrement)) {
    throw std::invalid_argument("tm: permanence values must be in [0,1]");
  }
  if (new_synapse_count == 0 || max_segments_per_cell == 0 ||
      max_synapses_per_segment == 0) {
    throw std::invalid_argument("tm: capacity parameters must be > 0");
  }
  if (cell_count() > UINT32_MAX) {
    throw std::invalid_argument("tm: too many cells");
  }
}

// ---------------------------------------------------------------------------
// ColumnProjector

ColumnProjector::ColumnProjector(uint32_t input_width, uint32_t column_count,
                                 uint64_t seed)
    : input_width_(input_width), column_count_(column_count) {
  if (input_width == 0 || column_count == 0) {
    throw std::invalid_argument("projector: widths must be > 0");
  }
  k_ = static_cast<uint32_t>(std::lround(0.02 * column_count));
  k_ = std::clamp<uint32_t>(k_, 1, column_count);
  columns_of_bit_.resize(input_width);
  // Each column's potential pool holds every input bit whose membership hash
  // lands in the lower half of the range (~50% of the bits).
  for (uint32_t col = 0; col < column_count; ++col) {
    for (uint32_t bit = 0; bit < input_width; ++bit) {
      if (hash_combine(seed ^ 0x706f6f6cULL, col, bit) & 1ULL) {
        columns_of_bit_[bit].push_back(col);
      }
    }
  }
}

Sdr ColumnProjector::project(const Sdr& encoding) const {
  if (encoding.width() != input_width_) {
    throw std::invalid_argument("projector: encoding width mismatch");
  }
  if (encoding.empty()) return Sdr(column_count_);

  std::vector<uint32_t> counts(column_count_, 0);
  for (uint32_t bit : encoding.active()) {
    for (uint32_t col : columns_of_bit_[bit]) ++counts[col];
  }
  // Pack (overlap desc, column asc) into one key so nth_element gives the
  // top-k with deterministic tie-breaks.
  std::vector<uint64_t> keys(column_count_);
  for (uint32_t col = 0; col < column_count_; ++col) {
    keys[col] = (uint64_t{counts[col]} << 32) | (column_count_ - 1 - col);
  }
  std::nth_element(keys.begin(), keys.begin() + (k_ - 1), keys.end(),
                   std::greater<>());
  std::vector<uint32_t> active;
  active.reserve(k_);
  for (uint32_t i = 0; i < k_; ++i) {
    active.push_back(column_count_ - 1 -
                     static_cast<uint32_t>(keys[i] & 0xffffffffULL));
  }
  return Sdr(column_count_, std::move(active));
}

// ---------------------------------------------------------------------------
// TemporalMemory

TemporalMemory::TemporalMemory(TmConfig cfg) : cfg_(cfg), rng_(cfg.seed) {
  cfg_.validate();
  cell_segments_.resize(cfg_.cell_count());
  synapses_of_presyn_.resize(cfg_.cell_count());
  cell_stamp_.assign(cfg_.cell_count(), 0);
}

bool TemporalMemory::prev_cell_active(uint32_t cell) const {
  return valid_cell_pass_ != 0 && cell_stamp_[cell] == valid_cell_pass_;
}

uint32_t TemporalMemory::potential_matches(const Segment& s) const {
  return (last_pass_ != 0 && s.potential_stamp == last_pass_)
             ? s.potential_count
             : 0;
}

namespace {
inline bool live(uint32_t gen) { return (gen & 1U) == 0; }
}  // namespace

uint32_t TemporalMemory::create_segment(uint32_t cell) {
  auto& owned = cell_segments_[cell];
  if (owned.size() >= cfg_.max_segments_per_cell) {
    // Recycle the least recently used segment on this cell.
    uint32_t lru = owned.front();
    for (uint32_t id : owned) {
      if (segments_[id].last_used < segments_[lru].last_used) lru = id;
    }
    destroy_segment(lru);
  }
  uint32_t id;
  if (!free_segments_.empty()) {
    id = free_segments_.back();
    free_segments_.pop_back();
    ++segments_[id].gen;  // odd -> even: slot live again
  } else {
    id = static_cast<uint32_t>(segments_.size());
    segments_.emplace_back();
  }
  Segment& s = segments_[id];
  s.cell = cell;
  s.last_used = step_;
  s.synapses.clear();
  s.active_stamp = s.potential_stamp = 0;
  owned.push_back(id);
  ++live_segments_;
  return id;
}

void TemporalMemory::destroy_segment(uint32_t seg_id) {
  Segment& s = segments_[seg_id];
  for (uint32_t syn : s.synapses) {
    ++synapses_[syn].gen;
    free_synapses_.push_back(syn);
    --live_synapses_;
  }
  s.synapses.clear();
  auto& owned = cell_segments_[s.cell];
  owned.erase(std::find(owned.begin(), owned.end(), seg_id));
  ++s.gen;
  free_segments_.push_back(seg_id);
  --live_segments_;
}

void TemporalMemory::destroy_synapse(uint32_t syn_id) {
  Synapse& y = synapses_[syn_id];
  Segment& s = segments_[y.segment];
  s.synapses.erase(std::find(s.synapses.begin(), s.synapses.end(), syn_id));
  ++y.gen;
  free_synapses_.push_back(syn_id);
  --live_synapses_;
}

void TemporalMemory::grow_synapses(uint32_t seg_id, uint32_t desired) {
  Segment& s = segments_[seg_id];
  if (desired == 0 || prev_winner_cells_.empty()) return;
  const size_t room = cfg_.max_synapses_per_segment > s.synapses.size()
                          ? cfg_.max_synapses_per_segment - s.synapses.size()
                          : 0;
  desired = std::min<uint32_t>(desired, static_cast<uint32_t>(room));
  if (desired == 0) return;

  std::vector<uint32_t> candidates;
  candidates.reserve(prev_winner_cells_.size());
  for (uint32_t cell : prev_winner_cells_) {
    bool present = false;
    for (uint32_t syn : s.synapses) {
      if (synapses_[syn].presyn == cell) {
        present = true;
        break;
      }
    }
    if (!present) candidates.push_back(cell);
  }
  // Partial Fisher-Yates keeps the subset choice reproducible.
  const uint32_t n =
      std::min<uint32_t>(desired, static_cast<uint32_t>(candidates.size()));
  for (uint32_t i = 0; i < n; ++i) {
    const auto j = i + draw_below(rng_, candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
    uint32_t id;
    if (!free_synapses_.empty()) {
      id = free_synapses_.back();
      free_synapses_.pop_back();
      ++synapses_[id].gen;  // odd -> even: slot live again
    } else {
      id = static_cast<uint32_t>(synapses_.size());
      synapses_.emplace_back();
    }
    Synapse& y = synapses_[id];
    y.segment = seg_id;
    y.presyn = candidates[i];
    y.permanence = cfg_.initial_permanence;
    s.synapses.push_back(id);
    synapses_of_presyn_[candidates[i]].push_back({id, y.gen});
    ++live_synapses_;
  }
}

void TemporalMemory::adapt_segment(uint32_t seg_id, float active_delta,
                                   float inactive_delta) {
  Segment& s = segments_[seg_id];
  std::vector<uint32_t> doomed;
  for (uint32_t syn : s.synapses) {
    Synapse& y = synapses_[syn];
    const float delta =
        prev_cell_active(y.presyn) ? active_delta : inactive_delta;
    y.permanence = std::min(1.0f, y.permanence + delta);
    if (y.permanence <= 0.0f) doomed.push_back(syn);
  }
  for (uint32_t syn : doomed) destroy_synapse(syn);
  if (s.synapses.empty()) destroy_segment(seg_id);
}

void TemporalMemory::punish_segment(uint32_t seg_id) {
  Segment& s = segments_[seg_id];
  std::vector<uint32_t> doomed;
  for (uint32_t syn : s.synapses) {
    Synapse& y = synapses_[syn];
    if (!prev_cell_active(y.presyn)) continue;
    y.permanence -= cfg_.predicted_decrement;
    if (y.permanence <= 0.0f) doomed.push_back(syn);
  }
  for (uint32_t syn : doomed) destroy_synapse(syn);
  if (s.synapses.empty()) destroy_segment(seg_id);
}

TemporalMemory::StepResult TemporalMemory::step(const Sdr& active_columns,
                                                bool learn) {
  if (active_columns.width() != cfg_.column_count) {
    throw std::invalid_argument("tm: active_columns width mismatch");
  }
  ++step_;
  const uint32_t cpc = cfg_.cells_per_column;
  const auto& cols = active_columns.active();

  std::vector<uint32_t> new_active;
  std::vector<uint32_t> new_winner;
  new_active.reserve(cols.size() * 2);
  new_winner.reserve(cols.size());

  // Predictive cells are sorted, so walk them in lockstep with the sorted
  // active columns.
  size_t p = 0;
  for (uint32_t col : cols) {
    const uint32_t first_cell = col * cpc;
    const uint32_t end_cell = first_cell + cpc;
    while (p < predictive_cells_.size() && predictive_cells_[p] < first_cell) {
      ++p;
    }
    size_t q = p;
    bool predicted = false;
    while (q < predictive_cells_.size() && predictive_cells_[q] < end_cell) {
      predicted = true;
      const uint32_t cell = predictive_cells_[q];
      new_active.push_back(cell);
      new_winner.push_back(cell);
      if (learn) {
        // Reinforce every segment that caused the correct prediction. Adapt
        // can destroy segments, so walk a copy of the cell's list.
        const std::vector<uint32_t> owned = cell_segments_[cell];
        for (uint32_t seg : owned) {
          Segment& s = segments_[seg];
          if (!live(s.gen) || last_pass_ == 0 ||
              s.active_stamp != last_pass_) {
            continue;
          }
          const uint32_t matches = potential_matches(s);
          adapt_segment(seg, cfg_.permanence_increment,
                        -cfg_.permanence_decrement);
          if (live(segments_[seg].gen) && cfg_.new_synapse_count > matches) {
            grow_synapses(seg, cfg_.new_synapse_count - matches);
          }
        }
      }
      ++q;
    }

    if (!predicted) {
      // Burst: every cell in the column activates.
      for (uint32_t cell = first_cell; cell < end_cell; ++cell) {
        new_active.push_back(cell);
      }
      // Winner is the cell owning the best matching segment, else the cell
      // with the fewest segments; ties go to the lowest index.
      uint32_t best_seg = UINT32_MAX;
      uint32_t best_cell = UINT32_MAX;
      uint32_t best_matches = 0;
      for (uint32_t cell = first_cell; cell < end_cell; ++cell) {
        for (uint32_t seg : cell_segments_[cell]) {
          const uint32_t m = potential_matches(segments_[seg]);
          if (m >= cfg_.min_threshold && m > best_matches) {
            best_matches = m;
            best_seg = seg;
            best_cell = cell;
          }
        }
      }
      if (best_seg != UINT32_MAX) {
        new_winner.push_back(best_cell);
        if (learn) {
          adapt_segment(best_seg, cfg_.permanence_increment,
                        -cfg_.permanence_decrement);
          if (live(segments_[best_seg].gen) &&
              cfg_.new_synapse_count > best_matches) {
            grow_synapses(best_seg, cfg_.new_synapse_count - best_matches);
          }
        }
      } else {
        uint32_t winner = first_cell;
        size_t fewest = cell_segments_[first_cell].size();
        for (uint32_t cell = first_cell + 1; cell < end_cell; ++cell) {
          if (cell_segments_[cell].size() < fewest) {
            fewest = cell_segments_[cell].size();
            winner = cell;
          }
        }
        new_winner.push_back(winner);
        if (learn && !prev_winner_cells_.empty()) {
          const uint32_t seg = create_segment(winner);
          grow_synapses(seg, cfg_.new_synapse_count);
        }
      }
    }
  }

  if (learn && last_pass_ != 0) {
    // Segments that predicted a column that stayed inactive lose permanence
    // on the synapses that drove the false prediction.
    for (uint32_t seg : matching_segment_list_) {
      const Segment& s = segments_[seg];
      if (!live(s.gen) || s.potential_stamp != last_pass_) continue;
      const uint32_t col = s.cell / cpc;
      if (!std::binary_search(cols.begin(), cols.end(), col)) {
        punish_segment(seg);
      }
    }
  }

  prev_active_cells_ = std::move(new_active);
  prev_winner_cells_ = std::move(new_winner);
  ++cell_pass_;
  valid_cell_pass_ = cell_pass_;
  for (uint32_t cell : prev_active_cells_) cell_stamp_[cell] = cell_pass_;

  dendrite_pass();

  std::vector<uint32_t> predicted_cols;
  predicted_cols.reserve(predictive_cells_.size());
  for (uint32_t cell : predictive_cells_) predicted_cols.push_back(cell / cpc);
  predicted_cols.erase(std::unique(predicted_cols.begin(), predicted_cols.end()),
                       predicted_cols.end());

  StepResult out;
  out.active_columns = active_columns;
  out.predicted_next = Sdr(cfg_.column_count, std::move(predicted_cols));
  return out;
}

void TemporalMemory::dendrite_pass() {
  last_pass_ = ++dendrite_counter_;
  active_segment_list_.clear();
  matching_segment_list_.clear();

  for (uint32_t cell : prev_active_cells_) {
    auto& entries = synapses_of_presyn_[cell];
    size_t w = 0;
    for (size_t r = 0; r < entries.size(); ++r) {
      const IndexEntry e = entries[r];
      const Synapse& y = synapses_[e.synapse];
      if (y.gen != e.gen) continue;  // dead or reused: drop on compaction
      entries[w++] = e;
      Segment& s = segments_[y.segment];
      if (s.potential_stamp != last_pass_) {
        s.potential_stamp = last_pass_;
        s.potential_count = 0;
      }
      if (++s.potential_count == cfg_.min_threshold) {
        matching_segment_list_.push_back(y.segment);
      }
      if (y.permanence >= cfg_.connected_permanence) {
        if (s.active_stamp != last_pass_) {
          s.active_stamp = last_pass_;
          s.connected_count = 0;
        }
        if (++s.connected_count == cfg_.activation_threshold) {
          active_segment_list_.push_back(y.segment);
        }
      }
    }
    entries.resize(w);
  }

  predictive_cells_.clear();
  for (uint32_t seg : active_segment_list_) {
    segments_[seg].last_used = step_;
    predictive_cells_.push_back(segments_[seg].cell);
  }
  std::sort(predictive_cells_.begin(), predictive_cells_.end());
  predictive_cells_.erase(
      std::unique(predictive_cells_.begin(), predictive_cells_.end()),
      predictive_cells_.end());
}

void TemporalMemory::reset() {
  prev_active_cells_.clear();
  prev_winner_cells_.clear();
  predictive_cells_.clear();
  active_segment_list_.clear();
  matching_segment_list_.clear();
  valid_cell_pass_ = 0;
  last_pass_ = 0;
}

std::vector<float> TemporalMemory::all_permanences() const {
  std::vector<float> out;
  out.reserve(live_synapses_);
  for (const Synapse& y : synapses_) {
    if (live(y.gen)) out.push_back(y.permanence);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snapshots

std::string TemporalMemory::save_state() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["config"] = {{"column_count", cfg_.column_count},
                 {"cells_per_column", cfg_.cells_per_column},
                 {"activation_threshold", cfg_.activation_threshold},
                 {"min_threshold", cfg_.min_threshold},
                 {"initial_permanence", cfg_.initial_permanence},
                 {"connected_permanence", cfg_.connected_permanence},
                 {"permanence_increment", cfg_.permanence_increment},
                 {"permanence_decrement", cfg_.permanence_decrement},
                 {"predicted_decrement", cfg_.predicted_decrement},
                 {"max_segments_per_cell", cfg_.max_segments_per_cell},
                 {"max_synapses_per_segment", cfg_.max_synapses_per_segment},
                 {"new_synapse_count", cfg_.new_synapse_count},
                 {"seed", cfg_.seed}};
  j["step"] = step_;
  std::ostringstream rng_text;
  rng_text << rng_;
  j["rng"] = rng_text.str();

  nlohmann::json segs = nlohmann::json::array();
  for (const Segment& s : segments_) {
    if (!live(s.gen)) continue;
    nlohmann::json syns = nlohmann::json::array();
    for (uint32_t syn : s.synapses) {
      const Synapse& y = synapses_[syn];
      syns.push_back({y.presyn, y.permanence});
    }
    segs.push_back({{"cell", s.cell},
                    {"last_used", s.last_used},
                    {"synapses", std::move(syns)}});
  }
  j["segments"] = std::move(segs);
  j["prev_active"] = prev_active_cells_;
  j["prev_winner"] = prev_winner_cells_;
  j["has_context"] = valid_cell_pass_ != 0;
  return j.dump();
}

TemporalMemory TemporalMemory::load_state(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (j.at("format_version").get<int>() != 1) {
    throw std::runtime_error("tm snapshot: unsupported format version");
  }
  const auto& jc = j.at("config");
  TmConfig cfg;
  cfg.column_count = jc.at("column_count").get<uint32_t>();
  cfg.cells_per_column = jc.at("cells_per_column").get<uint32_t>();
  cfg.activation_threshold = jc.at("activation_threshold").get<uint32_t>();
  cfg.min_threshold = jc.at("min_threshold").get<uint32_t>();
  cfg.initial_permanence = jc.at("initial_permanence").get<float>();
  cfg.connected_permanence = jc.at("connected_permanence").get<float>();
  cfg.permanence_increment = jc.at("permanence_increment").get<float>();
  cfg.permanence_decrement = jc.at("permanence_decrement").get<float>();
  cfg.predicted_decrement = jc.at("predicted_decrement").get<float>();
  cfg.max_segments_per_cell = jc.at("max_segments_per_cell").get<uint32_t>();
  cfg.max_synapses_per_segment =
      jc.at("max_synapses_per_segment").get<uint32_t>();
  cfg.new_synapse_count = jc.at("new_synapse_count").get<uint32_t>();
  cfg.seed = jc.at("seed").get<uint64_t>();

  TemporalMemory tm(cfg);
  tm.step_ = j.at("step").get<uint64_t>();
  std::istringstream rng_text(j.at("rng").get<std::string>());
  rng_text >> tm.rng_;

  for (const auto& js : j.at("segments")) {
    const auto cell = js.at("cell").get<uint32_t>();
    const uint32_t seg = tm.create_segment(cell);
    tm.segments_[seg].last_used = js.at("last_used").get<uint64_t>();
    for (const auto& jy : js.at("synapses")) {
      uint32_t id;
      if (!tm.free_synapses_.empty()) {
        id = tm.free_synapses_.back();
        tm.free_synapses_.pop_back();
      } else {
        id = static_cast<uint32_t>(tm.synapses_.size());
        tm.synapses_.emplace_back();
      }
      Synapse& y = tm.synapses_[id];
      y.segment = seg;
      y.presyn = jy.at(0).get<uint32_t>();
      y.permanence = jy.at(1).get<float>();
      tm.segments_[seg].synapses.push_back(id);
      tm.synapses_of_presyn_[y.presyn].push_back({id, y.gen});
      ++tm.live_synapses_;
    }
  }

  tm.prev_active_cells_ = j.at("prev_active").get<std::vector<uint32_t>>();
  tm.prev_winner_cells_ = j.at("prev_winner").get<std::vector<uint32_t>>();
  if (j.at("has_context").get<bool>()) {
    tm.cell_pass_ = 1;
    tm.valid_cell_pass_ = 1;
    for (uint32_t cell : tm.prev_active_cells_) tm.cell_stamp_[cell] = 1;
    // Re-deriving the dendrite activity from the restored active set puts
    // the predictive state back exactly.
    tm.dendrite_pass();
  }
  return tm;
}

}  // namespace streamad
