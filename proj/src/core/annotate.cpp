#include "annotate.hpp"

#include <map>
#include <vector>

#include "text.hpp"

namespace wmr {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  // Each piece keeps its terminator so joining reproduces the input.
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start + 1));
    start = nl + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string indentation(std::string_view line) {
  auto n = line.find_first_not_of(" \t");
  return std::string(line.substr(0, n == std::string_view::npos ? 0 : n));
}

bool label_char(unsigned char c) {
  return std::isalnum(c) || c == '+' || c == '[' || c == ']' || c == '.' || c >= 0x80;
}

}  // namespace

bool is_annotation_line(std::string_view line) {
  auto t = trim(line);
  if (t.substr(0, 2) != "//" || t.size() < 3) return false;
  if (t.substr(0, 8) == "//[Info:") return t.back() == ']';
  auto body = t.substr(2);
  if (body.front() == ' ' || body.front() == '\t') return false;
  auto sep = body.find("::");
  if (sep == std::string_view::npos || sep == 0) return false;
  for (char c : body.substr(0, sep)) {
    if (c == ' ' || c == '\t') return false;
  }
  for (unsigned char c : body.substr(sep + 2)) {
    if (!label_char(c)) return false;
  }
  return true;
}

std::string strip_annotations(std::string_view source) {
  std::string out;
  out.reserve(source.size());
  for (auto line : split_lines(source)) {
    if (!is_annotation_line(line)) out += line;
  }
  return out;
}

std::string script_hash(std::string_view source) { return "fnv1a64:" + fnv1a64_hex(strip_annotations(source)); }

std::string annotate(std::string_view source, const WMReport& report, bool compress) {
  const std::string stripped = strip_annotations(source);
  if ("fnv1a64:" + fnv1a64_hex(stripped) != report.script_hash) {
    throw AnnotateError("report was produced from a different script (hash " + report.script_hash + ")");
  }
  const auto lines = split_lines(stripped);

  std::map<int, std::vector<const ReportEntry*>> after;
  std::map<int, std::vector<const ReportEntry*>> before;
  for (const auto& e : report.entries) {
    if (e.span.line < 1 || e.span.line > lines.size()) {
      throw AnnotateError("candidate '" + e.name + "' points past the end of the script");
    }
    (e.synthetic ? before : after)[e.span.line].push_back(&e);
  }

  auto render = [&](const ReportEntry& e, const std::string& indent, const std::string& eol) {
    std::string out = indent + "//" + e.name + "::";
    if (e.labels.empty()) return out + eol;
    if (compress) return out + render_compressed(e.labels) + eol;
    return out + render_labels(e.labels) + eol + indent + "//[Info:" + render_infos(e.labels) + "]" + eol;
  };

  std::string out;
  out.reserve(stripped.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    std::string_view line = lines[i];
    const std::string eol = line.size() >= 2 && line.substr(line.size() - 2) == "\r\n" ? "\r\n" : "\n";
    const std::string indent = indentation(line);
    if (auto it = before.find(line_no); it != before.end()) {
      for (const auto* e : it->second) out += render(*e, indent, eol);
    }
    out += line;
    if (auto it = after.find(line_no); it != after.end()) {
      if (line.empty() || line.back() != '\n') out += eol;
      for (const auto* e : it->second) out += render(*e, indent, eol);
    }
  }
  return out;
}

}  // namespace wmr
