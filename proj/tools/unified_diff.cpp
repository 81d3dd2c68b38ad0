#include "unified_diff.hpp"

#include <algorithm>

namespace wmr::tools {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<DiffOp> myers_diff(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const long n = static_cast<long>(a.size());
  const long m = static_cast<long>(b.size());
  const long max = n + m;
  const long off = max + 1;
  std::vector<long> v(2 * max + 3, 0);
  std::vector<std::vector<long>> trace;

  long final_d = 0;
  for (long d = 0; d <= max; ++d) {
    trace.push_back(v);
    bool done = false;
    for (long k = -d; k <= d; k += 2) {
      long x = (k == -d || (k != d && v[k - 1 + off] < v[k + 1 + off])) ? v[k + 1 + off] : v[k - 1 + off] + 1;
      long y = x - k;
      while (x < n && y < m && a[x] == b[y]) ++x, ++y;
      v[k + off] = x;
      if (x >= n && y >= m) {
        done = true;
        break;
      }
    }
    if (done) {
      final_d = d;
      break;
    }
  }

  std::vector<DiffOp> ops;
  long x = n;
  long y = m;
  for (long d = final_d; d >= 0; --d) {
    const auto& tv = trace[d];
    const long k = x - y;
    const long prev_k = (k == -d || (k != d && tv[k - 1 + off] < tv[k + 1 + off])) ? k + 1 : k - 1;
    const long prev_x = tv[prev_k + off];
    const long prev_y = prev_x - prev_k;
    while (x > prev_x && y > prev_y) {
      ops.push_back({DiffOp::Equal, static_cast<std::size_t>(x - 1), static_cast<std::size_t>(y - 1)});
      --x, --y;
    }
    if (d > 0) {
      if (x == prev_x) {
        ops.push_back({DiffOp::Insert, static_cast<std::size_t>(x), static_cast<std::size_t>(y - 1)});
      } else {
        ops.push_back({DiffOp::Delete, static_cast<std::size_t>(x - 1), static_cast<std::size_t>(y)});
      }
    }
    x = prev_x;
    y = prev_y;
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

std::string unified_diff(std::string_view a_text, std::string_view b_text, std::string_view a_name,
                         std::string_view b_name, std::size_t context) {
  const auto a = split_lines(a_text);
  const auto b = split_lines(b_text);
  const auto ops = myers_diff(a, b);
  if (std::all_of(ops.begin(), ops.end(), [](const DiffOp& o) { return o.kind == DiffOp::Equal; })) {
    return a_text == b_text ? "" : "--- " + std::string(a_name) + "\n+++ " + std::string(b_name) +
                                       "\n(texts differ only in the final newline)\n";
  }

  std::string out = "--- " + std::string(a_name) + "\n+++ " + std::string(b_name) + "\n";
  std::size_t i = 0;
  while (i < ops.size()) {
    while (i < ops.size() && ops[i].kind == DiffOp::Equal) ++i;
    if (i == ops.size()) break;
    // Hunk spans from `context` lines before the first change to `context` after the last nearby one.
    std::size_t start = i >= context ? i - context : 0;
    std::size_t end = i;
    while (end < ops.size()) {
      if (ops[end].kind != DiffOp::Equal) {
        ++end;
        continue;
      }
      std::size_t run = end;
      while (run < ops.size() && ops[run].kind == DiffOp::Equal) ++run;
      if (run == ops.size() || run - end > 2 * context) {
        end = std::min(run, end + context);
        break;
      }
      end = run;
    }

    std::size_t a_start = 0, b_start = 0, a_len = 0, b_len = 0;
    bool first = true;
    std::string body;
    for (std::size_t j = start; j < end; ++j) {
      const auto& o = ops[j];
      if (first) {
        a_start = o.a;
        b_start = o.b;
        first = false;
      }
      switch (o.kind) {
        case DiffOp::Equal:
          body += " " + a[o.a] + "\n";
          ++a_len, ++b_len;
          break;
        case DiffOp::Delete:
          body += "-" + a[o.a] + "\n";
          ++a_len;
          break;
        case DiffOp::Insert:
          body += "+" + b[o.b] + "\n";
          ++b_len;
          break;
      }
    }
    out += "@@ -" + std::to_string(a_len ? a_start + 1 : a_start) + "," + std::to_string(a_len) + " +" +
           std::to_string(b_len ? b_start + 1 : b_start) + "," + std::to_string(b_len) + " @@\n" + body;
    i = end;
  }
  return out;
}

}  // namespace wmr::tools
