#include "qdcascade/timetags.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qdc {

namespace {

constexpr char kMagic[9] = "QDTTAG01";
constexpr const char* kCsvHeader = "channel,timestamp_ps";

const std::array<const char*, 4> kChannelNames = {
    "XX co-polarized", "XX cross-polarized", "X co-polarized",
    "X cross-polarized"};

bool _ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() &&
         s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

void _write_sidecar(const std::string& path, size_t n_tags,
                    const TagStreamMeta& meta) {
  nlohmann::json j = meta.to_json();
  j["n_tags"] = n_tags;
  nlohmann::json ch;
  for (int c = 0; c < 4; ++c) ch[std::to_string(c)] = kChannelNames[c];
  j["channels"] = ch;
  std::ofstream out(path + ".meta.json");
  if (!out) throw std::runtime_error("cannot write sidecar for " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

nlohmann::json TagStreamMeta::to_json() const {
  nlohmann::json j;
  j["format"] = "qdttag-v1";
  j["sync_period_ps"] = sync_period;
  j["setting"] = setting;
  j["config"] = config.is_null() ? nlohmann::json::object() : config;
  return j;
}

TagStreamMeta TagStreamMeta::from_json(const nlohmann::json& j) {
  TagStreamMeta m;
  m.sync_period = j.value("sync_period_ps", 0.0);
  m.setting = j.value("setting", std::string());
  if (j.contains("config")) m.config = j.at("config");
  return m;
}

void write_timetags(const std::string& path, const std::vector<TimeTag>& tags,
                    const TagStreamMeta& meta) {
  if (_ends_with(path, ".csv")) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << kCsvHeader << "\n";
    for (const TimeTag& t : tags)
      out << static_cast<int>(t.channel) << "," << t.timestamp << "\n";
    if (!out) throw std::runtime_error("write failed on " + path);
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(kMagic, 8);
    for (const TimeTag& t : tags) {
      char rec[9];
      rec[0] = static_cast<char>(t.channel);
      for (int i = 0; i < 8; ++i)
        rec[1 + i] = static_cast<char>((t.timestamp >> (8 * i)) & 0xFF);
      out.write(rec, 9);
    }
    if (!out) throw std::runtime_error("write failed on " + path);
  }
  _write_sidecar(path, tags.size(), meta);
}

TagStream read_timetags(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  TagStream stream;

  char head[8] = {};
  in.read(head, 8);
  if (in.gcount() == 8 && std::memcmp(head, kMagic, 8) == 0) {
    char rec[9];
    size_t offset = 8;
    while (in.read(rec, 9)) {
      uint64_t ts = 0;
      for (int i = 0; i < 8; ++i)
        ts |= static_cast<uint64_t>(static_cast<unsigned char>(rec[1 + i]))
              << (8 * i);
      stream.tags.push_back(TimeTag{ts, static_cast<uint8_t>(rec[0])});
      offset += 9;
    }
    if (in.gcount() != 0)
      throw std::runtime_error(path + ": truncated record at byte offset " +
                               std::to_string(offset));
  } else {
    in.clear();
    in.seekg(0);
    std::string line;
    if (!std::getline(in, line) ||
        line.substr(0, std::strlen(kCsvHeader)) != kCsvHeader)
      throw std::runtime_error(
          path + ": unrecognized time-tag format (no magic, no CSV header)");
    size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream ss(line);
      long long ch = -1;
      char comma = 0;
      unsigned long long ts = 0;
      if (!(ss >> ch >> comma >> ts) || comma != ',' || ch < 0 || ch > 255)
        throw std::runtime_error(path + ": malformed CSV record on line " +
                                 std::to_string(lineno));
      stream.tags.push_back(TimeTag{ts, static_cast<uint8_t>(ch)});
    }
  }

  std::ifstream side(path + ".meta.json");
  if (side) {
    nlohmann::json j;
    side >> j;
    stream.meta = TagStreamMeta::from_json(j);
  }
  return stream;
}

}  // namespace qdc
