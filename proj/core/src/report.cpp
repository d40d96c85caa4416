#include "vdsr/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "vdsr/errors.hpp"

namespace vdsr {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw FormatError("unterminated quote in CSV line");
  return fields;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("cannot parse number '" + s + "'");
  }
  return v;
}

}  // namespace

void EvalTable::add(const std::string& scene, const std::string& method,
                    const QualityScore& score) {
  if (std::find(scenes_.begin(), scenes_.end(), scene) == scenes_.end()) scenes_.push_back(scene);
  if (std::find(methods_.begin(), methods_.end(), method) == methods_.end()) methods_.push_back(method);
  rows_.push_back({scene, method, score.psnr_db, score.ssim});
}

std::string EvalTable::render_grid() const {
  std::ostringstream os;
  os << "scene";
  for (const auto& m : methods_) os << '\t' << m;
  os << '\n';
  for (const auto& s : scenes_) {
    os << s;
    for (const auto& m : methods_) {
      const auto it = std::find_if(rows_.begin(), rows_.end(),
                                   [&](const EvalRow& r) { return r.scene == s && r.method == m; });
      os << '\t' << (it == rows_.end() ? std::string("-") : format_score_cell({it->psnr_db, it->ssim}));
    }
    os << '\n';
  }
  return os.str();
}

std::string render_rows_csv(const std::vector<EvalRow>& rows) {
  std::ostringstream os;
  os << "scene,method,psnr_db,ssim\n";
  for (const auto& r : rows) {
    os << csv_field(r.scene) << ',' << csv_field(r.method) << ',' << exact(r.psnr_db) << ','
       << exact(r.ssim) << '\n';
  }
  return os.str();
}

std::vector<EvalRow> parse_rows_csv(std::string_view text) {
  std::vector<EvalRow> rows;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "scene,method,psnr_db,ssim") throw FormatError("unexpected CSV header");
      header = false;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 4) throw FormatError("expected 4 CSV fields");
    rows.push_back({f[0], f[1], parse_double(f[2]), parse_double(f[3])});
  }
  if (header) throw FormatError("missing CSV header");
  return rows;
}

}  // namespace vdsr
