#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "interpreter.hpp"
#include "reconstructor.hpp"

namespace wmr {

inline constexpr int kReportVersion = 1;

/// The reconstructed machine: one entry per candidate, in opening order.
struct WMReport {
  std::string script;
  std::string script_hash;
  RunOutcome outcome;
  nlohmann::ordered_json config;
  std::vector<ReportEntry> entries;
  std::vector<std::string> warnings;
  std::uint64_t faults = 0;

  std::size_t epsilon_count() const;
  std::size_t labelled_count() const { return entries.size() - epsilon_count(); }
};

// Stable, byte-exact rendering; one compact line per entry.
std::string report_to_json(const WMReport& report);
std::string entry_to_json(const ReportEntry& entry);

// Human summary: counts, then epsilon candidates, then labelled ones.
std::string summary_table(const WMReport& report, bool compress);

}  // namespace wmr
