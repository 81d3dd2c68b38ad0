#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "layout.hpp"

namespace wmr {

/// Everything that can change a session's behaviour. Flat keys mirror the CLI
/// flags and the configuration file.
struct RunConfig {
  AddressSpaceConfig layout = AddressSpaceConfig::defaults();
  std::uint32_t element_size = 0x58;
  bool aware_custom_alloc = false;
  std::optional<int> auto_candidates;  // wrapping depth when enabled
  bool compress_labels = false;
  std::uint64_t timeout_events = 5'000'000;

  std::string report_path;
  std::string trace_path;
  std::string annotate_path;

  // Throws ConfigError on an unknown key or malformed value.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  static const std::vector<std::string>& keys();

  // Flat JSON object; keys as for set().
  void apply_json(const nlohmann::json& object);
  void load_file(const std::string& path);

  void validate() const;

  // Analysis-relevant settings in stable key order; recorded in reports and traces.
  nlohmann::ordered_json echo() const;
  static RunConfig from_echo(const nlohmann::json& echo);
};

}  // namespace wmr
