#include "report.hpp"

#include <sstream>

namespace wmr {

using nlohmann::ordered_json;

std::size_t WMReport::epsilon_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.labels.empty() ? 1 : 0;
  return n;
}

std::string entry_to_json(const ReportEntry& e) {
  ordered_json j;
  j["name"] = e.name;
  j["span"] = to_string(e.span);
  j["kind"] = std::string(to_string(e.kind));
  j["synthetic"] = e.synthetic;
  j["labels"] = render_labels(e.labels);
  ordered_json info = ordered_json::array();
  for (const auto& p : e.labels) info.push_back(p.info);
  j["info"] = info;
  j["events"] = ordered_json::array({e.open_index, e.close_index});
  return j.dump();
}

std::string report_to_json(const WMReport& r) {
  auto q = [](const std::string& s) { return ordered_json(s).dump(); };
  std::ostringstream out;
  out << "{\n";
  out << "  \"version\": " << kReportVersion << ",\n";
  out << "  \"script\": " << q(r.script) << ",\n";
  out << "  \"script_hash\": " << q(r.script_hash) << ",\n";
  out << "  \"outcome\": " << q(std::string(to_string(r.outcome.status))) << ",\n";
  out << "  \"reason\": " << q(r.outcome.reason) << ",\n";
  out << "  \"location\": "
      << (r.outcome.status == RunStatus::ScriptError ? q(to_string(r.outcome.location)) : std::string("null"))
      << ",\n";
  out << "  \"event_count\": " << r.outcome.event_count << ",\n";
  out << "  \"config\": " << r.config.dump() << ",\n";
  out << "  \"summary\": {\"candidates\": " << r.entries.size() << ", \"labelled\": " << r.labelled_count()
      << ", \"epsilon\": " << r.epsilon_count() << ", \"faults\": " << r.faults << "},\n";
  out << "  \"warnings\": " << ordered_json(r.warnings).dump() << ",\n";
  out << "  \"entries\": [";
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    out << (i ? ",\n    " : "\n    ") << entry_to_json(r.entries[i]);
  }
  out << (r.entries.empty() ? "]\n" : "\n  ]\n");
  out << "}\n";
  return out.str();
}

std::string summary_table(const WMReport& r, bool compress) {
  std::ostringstream out;
  out << r.script << ": " << to_string(r.outcome.status);
  if (!r.outcome.reason.empty()) out << " (" << r.outcome.reason << ")";
  out << "\n";
  out << "  events " << r.outcome.event_count << ", candidates " << r.entries.size() << ", labelled "
      << r.labelled_count() << ", epsilon " << r.epsilon_count() << ", faults " << r.faults << "\n";
  if (r.epsilon_count() > 0) {
    out << "  unlabelled:";
    for (const auto& e : r.entries) {
      if (e.labels.empty()) out << " " << e.name;
    }
    out << "\n";
  }
  for (const auto& e : r.entries) {
    if (e.labels.empty()) continue;
    std::string l = compress ? render_compressed(e.labels) : render_labels(e.labels);
    if (l.size() > 96) l = l.substr(0, 93) + "...";
    out << "  " << e.name << " [" << to_string(e.span) << "] " << l << "\n";
  }
  for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
  return out.str();
}

}  // namespace wmr
