#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "config.hpp"
#include "report.hpp"

namespace wmr {

struct AnalyzeOptions {
  std::ostream* trace_out = nullptr;  // receives the .wmt stream when set
};

/// Parses, runs and reconstructs one script. Throws ParseError on syntax
/// errors and ConfigError on an invalid configuration; every run outcome
/// (including script errors and timeouts) is reported, not thrown.
WMReport analyze_source(std::string_view source, const std::string& script_name, const RunConfig& config,
                        const AnalyzeOptions& options = {});

/// Rebuilds the report from a recorded trace. `aware_override` replaces the
/// recorded detection mode when set. Throws TraceError on integrity failures.
WMReport analyze_trace(std::istream& in, std::optional<bool> aware_override = std::nullopt);

}  // namespace wmr
