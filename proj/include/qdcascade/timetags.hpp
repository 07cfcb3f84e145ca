#pragma once
// Time-tag stream files.  Binary: 8-byte magic "QDTTAG01" followed by
// records of { channel: u8, timestamp: u64 little-endian ps }.  CSV
// alternative: header "channel,timestamp_ps".  Every written stream gets a
// human-readable JSON sidecar (<path>.meta.json) naming the channel
// semantics, the sync period, and the generating configuration.

#include <string>
#include <vector>

#include <json.hpp>

#include "qdcascade/montecarlo.hpp"

namespace qdc {

struct TagStreamMeta {
  double sync_period = 0;  // [ps]; 0 = unknown
  std::string setting;     // e.g. "rectilinear", "diagonal", "circular"
  nlohmann::json config;   // free-form generation record

  nlohmann::json to_json() const;
  static TagStreamMeta from_json(const nlohmann::json& j);
};

// Format chosen by extension: ".csv" writes CSV, anything else binary.
void write_timetags(const std::string& path, const std::vector<TimeTag>& tags,
                    const TagStreamMeta& meta);

struct TagStream {
  std::vector<TimeTag> tags;
  TagStreamMeta meta;  // default-initialized when no sidecar exists
};

// Detects the format from the content (magic / CSV header); throws
// std::runtime_error on malformed or truncated input, naming the offset.
TagStream read_timetags(const std::string& path);

}  // namespace qdc
