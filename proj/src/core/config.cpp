#include "config.hpp"

#include <fstream>

#include "errors.hpp"

namespace wmr {

namespace {

std::uint32_t to_u32(std::string_view key, std::string_view value) {
  std::uint64_t v;
  try {
    v = parse_integer(value);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(value) + "'");
  }
  if (v > 0xffffffffull) throw ConfigError("value for '" + std::string(key) + "' exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("invalid boolean for '" + std::string(key) + "': '" + std::string(value) + "'");
}

RegionSpec* jit_window(AddressSpaceConfig& layout) {
  for (auto& r : layout.code) {
    if (r.label == "jit") return &r;
  }
  return nullptr;
}

const RegionSpec* jit_window(const AddressSpaceConfig& layout) {
  return jit_window(const_cast<AddressSpaceConfig&>(layout));
}

nlohmann::ordered_json region_json(const RegionSpec& r) {
  nlohmann::ordered_json j;
  j["label"] = r.label;
  j["base"] = format_address(r.base);
  j["size"] = r.size;
  return j;
}

RegionSpec region_from_json(const nlohmann::json& j) {
  return {Address{static_cast<std::uint32_t>(parse_integer(j.at("base").get<std::string>()))},
          j.at("size").get<std::uint32_t>(), j.at("label").get<std::string>()};
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "code_base",        "code_size",     "stack_base",         "stack_size",      "heap_base",
      "heap_size",        "jit_base",      "jit_size",           "aslr_seed",       "arena_chunk_size",
      "bypass_threshold", "element_size",  "aware_custom_alloc", "auto_candidates", "compress_labels",
      "timeout_events",   "report",        "trace",              "annotate"};
  return k;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  auto& code = layout.code.front();
  auto& stack = layout.stack.front();
  if (key == "code_base") {
    code.base = Address{to_u32(key, value)};
  } else if (key == "code_size") {
    code.size = to_u32(key, value);
  } else if (key == "stack_base") {
    stack.base = Address{to_u32(key, value)};
  } else if (key == "stack_size") {
    stack.size = to_u32(key, value);
  } else if (key == "heap_base") {
    layout.heap.base = Address{to_u32(key, value)};
  } else if (key == "heap_size") {
    layout.heap.size = to_u32(key, value);
  } else if (key == "jit_base" || key == "jit_size") {
    RegionSpec* jit = jit_window(layout);
    if (!jit) {
      layout.code.push_back({Address{0}, 0, "jit"});
      jit = &layout.code.back();
    }
    (key == "jit_base" ? jit->base.value : jit->size) = to_u32(key, value);
  } else if (key == "aslr_seed") {
    if (value.empty() || value == "none" || value == "null") {
      layout.aslr_seed.reset();
    } else {
      try {
        layout.aslr_seed = parse_integer(value);
      } catch (const std::exception&) {
        throw ConfigError("invalid integer for 'aslr_seed': '" + std::string(value) + "'");
      }
    }
  } else if (key == "arena_chunk_size") {
    layout.arena_chunk_size = to_u32(key, value);
  } else if (key == "bypass_threshold") {
    layout.bypass_threshold = to_u32(key, value);
  } else if (key == "element_size") {
    element_size = to_u32(key, value);
  } else if (key == "aware_custom_alloc") {
    aware_custom_alloc = to_bool(key, value);
  } else if (key == "auto_candidates") {
    if (value == "true" || value == "on" || value == "yes") {
      auto_candidates = 0;
    } else if (value == "false" || value == "off" || value == "no" || value == "none") {
      auto_candidates.reset();
    } else {
      auto_candidates = static_cast<int>(to_u32(key, value));
    }
  } else if (key == "compress_labels") {
    compress_labels = to_bool(key, value);
  } else if (key == "timeout_events") {
    try {
      timeout_events = parse_integer(value);
    } catch (const std::exception&) {
      throw ConfigError("invalid integer for 'timeout_events': '" + std::string(value) + "'");
    }
  } else if (key == "report") {
    report_path = value;
  } else if (key == "trace") {
    trace_path = value;
  } else if (key == "annotate") {
    annotate_path = value;
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

std::string RunConfig::get(std::string_view key) const {
  const auto& code = layout.code.front();
  const auto& stack = layout.stack.front();
  const RegionSpec* jit = jit_window(layout);
  if (key == "code_base") return format_address(code.base);
  if (key == "code_size") return std::to_string(code.size);
  if (key == "stack_base") return format_address(stack.base);
  if (key == "stack_size") return std::to_string(stack.size);
  if (key == "heap_base") return format_address(layout.heap.base);
  if (key == "heap_size") return std::to_string(layout.heap.size);
  if (key == "jit_base") return jit ? format_address(jit->base) : "";
  if (key == "jit_size") return jit ? std::to_string(jit->size) : "0";
  if (key == "aslr_seed") return layout.aslr_seed ? std::to_string(*layout.aslr_seed) : "none";
  if (key == "arena_chunk_size") return std::to_string(layout.arena_chunk_size);
  if (key == "bypass_threshold") return std::to_string(layout.bypass_threshold);
  if (key == "element_size") return std::to_string(element_size);
  if (key == "aware_custom_alloc") return aware_custom_alloc ? "true" : "false";
  if (key == "auto_candidates") return auto_candidates ? std::to_string(*auto_candidates) : "false";
  if (key == "compress_labels") return compress_labels ? "true" : "false";
  if (key == "timeout_events") return std::to_string(timeout_events);
  if (key == "report") return report_path;
  if (key == "trace") return trace_path;
  if (key == "annotate") return annotate_path;
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

void RunConfig::apply_json(const nlohmann::json& object) {
  if (!object.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (value.is_string()) {
      set(key, value.get<std::string>());
    } else if (value.is_boolean()) {
      set(key, value.get<bool>() ? "true" : "false");
    } else if (value.is_number_unsigned() || value.is_number_integer()) {
      set(key, std::to_string(value.get<std::int64_t>()));
    } else if (value.is_null()) {
      set(key, "none");
    } else {
      throw ConfigError("unsupported value type for '" + key + "'");
    }
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed configuration file '" + path + "': " + e.what());
  }
  apply_json(j);
}

void RunConfig::validate() const {
  wmr::validate(layout);
  if (element_size == 0) throw ConfigError("element_size must be positive");
  if (element_size >= layout.arena_chunk_size) throw ConfigError("element_size must be below arena_chunk_size");
  if (timeout_events == 0) throw ConfigError("timeout_events must be positive");
  if (auto_candidates && *auto_candidates < 0) throw ConfigError("auto_candidates depth must be >= 0");
}

nlohmann::ordered_json RunConfig::echo() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json lay;
  lay["code"] = nlohmann::ordered_json::array();
  for (const auto& r : layout.code) lay["code"].push_back(region_json(r));
  lay["stack"] = nlohmann::ordered_json::array();
  for (const auto& r : layout.stack) lay["stack"].push_back(region_json(r));
  lay["heap"] = region_json(layout.heap);
  lay["aslr_seed"] = layout.aslr_seed ? nlohmann::ordered_json(*layout.aslr_seed) : nlohmann::ordered_json();
  j["layout"] = lay;
  j["arena_chunk_size"] = layout.arena_chunk_size;
  j["bypass_threshold"] = layout.bypass_threshold;
  j["element_size"] = element_size;
  j["aware_custom_alloc"] = aware_custom_alloc;
  j["auto_candidates"] = auto_candidates ? nlohmann::ordered_json(*auto_candidates) : nlohmann::ordered_json();
  j["timeout_events"] = timeout_events;
  return j;
}

RunConfig RunConfig::from_echo(const nlohmann::json& j) {
  RunConfig c;
  try {
    const auto& lay = j.at("layout");
    c.layout.code.clear();
    for (const auto& r : lay.at("code")) c.layout.code.push_back(region_from_json(r));
    c.layout.stack.clear();
    for (const auto& r : lay.at("stack")) c.layout.stack.push_back(region_from_json(r));
    c.layout.heap = region_from_json(lay.at("heap"));
    if (!lay.at("aslr_seed").is_null()) c.layout.aslr_seed = lay.at("aslr_seed").get<std::uint64_t>();
    c.layout.arena_chunk_size = j.at("arena_chunk_size").get<std::uint32_t>();
    c.layout.bypass_threshold = j.at("bypass_threshold").get<std::uint32_t>();
    c.element_size = j.at("element_size").get<std::uint32_t>();
    c.aware_custom_alloc = j.at("aware_custom_alloc").get<bool>();
    if (!j.at("auto_candidates").is_null()) c.auto_candidates = j.at("auto_candidates").get<int>();
    c.timeout_events = j.at("timeout_events").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed configuration record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("malformed configuration record: ") + e.what());
  }
  return c;
}

}  // namespace wmr
