#pragma once

#include <string>

#include "streamad/multi.hpp"
#include "streamad/pipeline.hpp"

namespace streamad {

/// Detection settings as loaded from a JSON config file. Every field is
/// optional; omitted fields keep the documented defaults.
struct LoadedConfig {
  PipelineConfig pipeline;
  MultiConfig multi;
};

/// Parses a config JSON document. Throws std::runtime_error with a
/// human-readable message on malformed JSON or invalid values.
LoadedConfig parse_config_json(const std::string& json_text);

/// Reads and parses a config file. Throws std::runtime_error on I/O errors.
LoadedConfig load_config_file(const std::string& path);

}  // namespace streamad
