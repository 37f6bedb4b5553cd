#include "streamad/config_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace streamad {
namespace {

using nlohmann::json;

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (const auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

LoadedConfig parse_config_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }
  LoadedConfig cfg;
  try {
    get_if(j, "seed", cfg.pipeline.seed);
    get_if(j, "probation_fraction", cfg.pipeline.probation_fraction);
    get_if(j, "probation_cap", cfg.pipeline.probation_cap);
    get_if(j, "hard_fail", cfg.pipeline.hard_fail);

    if (const auto it = j.find("encoder"); it != j.end()) {
      const json& je = *it;
      get_if(je, "resolution", cfg.pipeline.scalar.resolution);
      get_if(je, "min_resolution", cfg.pipeline.min_resolution);
      get_if(je, "auto_resolution_divisor",
             cfg.pipeline.auto_resolution_divisor);
      get_if(je, "active_bits", cfg.pipeline.scalar.active_bits);
      get_if(je, "width", cfg.pipeline.scalar.width);
      get_if(je, "time_of_day", cfg.pipeline.time_enc.time_of_day);
      get_if(je, "tod_active_bits", cfg.pipeline.time_enc.tod_active_bits);
      get_if(je, "tod_width", cfg.pipeline.time_enc.tod_width);
      get_if(je, "tod_bucket_seconds",
             cfg.pipeline.time_enc.tod_bucket_seconds);
      get_if(je, "day_of_week", cfg.pipeline.time_enc.day_of_week);
      get_if(je, "dow_active_bits", cfg.pipeline.time_enc.dow_active_bits);
      get_if(je, "dow_width", cfg.pipeline.time_enc.dow_width);
    }

    if (const auto it = j.find("tm"); it != j.end()) {
      const json& jt = *it;
      TmConfig& tm = cfg.pipeline.tm;
      get_if(jt, "column_count", tm.column_count);
      get_if(jt, "cells_per_column", tm.cells_per_column);
      get_if(jt, "activation_threshold", tm.activation_threshold);
      get_if(jt, "min_threshold", tm.min_threshold);
      get_if(jt, "initial_permanence", tm.initial_permanence);
      get_if(jt, "connected_permanence", tm.connected_permanence);
      get_if(jt, "permanence_increment", tm.permanence_increment);
      get_if(jt, "permanence_decrement", tm.permanence_decrement);
      get_if(jt, "predicted_decrement", tm.predicted_decrement);
      get_if(jt, "max_segments_per_cell", tm.max_segments_per_cell);
      get_if(jt, "max_synapses_per_segment", tm.max_synapses_per_segment);
      get_if(jt, "new_synapse_count", tm.new_synapse_count);
    }

    if (const auto it = j.find("likelihood"); it != j.end()) {
      const json& jl = *it;
      LikelihoodConfig& lk = cfg.pipeline.likelihood;
      get_if(jl, "long_window", lk.long_window);
      get_if(jl, "short_window", lk.short_window);
      get_if(jl, "epsilon", lk.epsilon);
      get_if(jl, "min_variance_floor", lk.min_variance_floor);
      get_if(jl, "warmup_min", lk.warmup_min);
    }

    if (const auto it = j.find("multi"); it != j.end()) {
      const json& jm = *it;
      get_if(jm, "sigma", cfg.multi.sigma);
      get_if(jm, "kernel_span", cfg.multi.kernel_span);
      get_if(jm, "epsilon", cfg.multi.epsilon);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: bad field type: ") +
                             e.what());
  }

  try {
    cfg.pipeline.validate();
    cfg.multi.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  return cfg;
}

LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

}  // namespace streamad
