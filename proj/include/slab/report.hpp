#pragma once

// Report objects shared by the command-line tools. Every report embeds the
// full config, its hash, and the convention records; the timestamp lives in
// a separate field so the payload (everything else) is byte-identical across
// reruns with the same config and seed. nlohmann objects serialize with
// sorted keys, which makes dump() canonical.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slab/config.hpp"
#include "slab/tolerances.hpp"

namespace slab {

struct VerifyItem {
  std::string id;
  int battery = 0;
  std::uint64_t seed = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool blocking = true;  // report-only diagnostics set this false
  std::string note;
};

inline json to_json(const VerifyItem& it) {
  json j;
  j["id"] = it.id;
  j["battery"] = it.battery;
  j["seed"] = it.seed;
  j["max_residual"] = it.max_residual;
  j["tolerance"] = it.tolerance;
  j["pass"] = it.pass;
  j["blocking"] = it.blocking;
  if (!it.note.empty()) j["note"] = it.note;
  return j;
}

struct Report {
  std::string kind;  // verify | scenario | state | quantize
  RunConfig config;
  std::vector<VerifyItem> items;
  json extras = json::object();

  bool all_pass() const {
    for (const VerifyItem& it : items)
      if (it.blocking && !it.pass) return false;
    return true;
  }
};

inline json conventions_json(const RunConfig& c) {
  json j;
  j["mass_term"] = kMassConvention;
  j["topology"] = kTopologyConvention;
  j["signature"] = to_string(rep_of(c).sig);
  j["weight"] = "plain-components";
  j["star_product"] = kStarConvention;
  j["zero_mode_policy"] = c.zero_mode_policy;
  return j;
}

// The payload excludes the timestamp; its dump is the determinism contract.
inline json report_payload(const Report& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = r.kind;
  j["config"] = to_json(r.config);
  j["config_hash"] = config_hash(r.config);
  j["conventions"] = conventions_json(r.config);
  j["seed"] = r.config.seed;
  json items = json::array();
  for (const VerifyItem& it : r.items) items.push_back(to_json(it));
  j["items"] = items;
  j["pass"] = r.all_pass();
  j["extras"] = r.extras;
  return j;
}

inline std::string payload_hash(const Report& r) {
  return hex_u64(fnv1a64(report_payload(r).dump()));
}

inline json report_json(const Report& r) {
  json j = report_payload(r);
  j["payload_hash"] = payload_hash(r);
  const auto now = std::chrono::system_clock::now();
  j["timestamp_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch())
          .count();
  return j;
}

inline void write_report(const Report& r, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("report: cannot write " + path);
  f << report_json(r).dump(2) << "\n";
}

}  // namespace slab
