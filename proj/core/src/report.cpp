#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "holderlab/field_io.hpp"
#include "holderlab/lab.hpp"
#include "json.hpp"

namespace holderlab {

namespace {

using nlohmann::json;

json metric_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string status_of(const RunArtifacts& art) {
  if (art.error_kind) return "error";
  return art.passed() ? "passed" : "failed";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::set<ReportFormat> parse_formats(std::string_view list) {
  std::set<ReportFormat> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t end = std::min(list.find(',', pos), list.size());
    std::string item(list.substr(pos, end - pos));
    std::transform(item.begin(), item.end(), item.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (item == "csv") {
      out.insert(ReportFormat::Csv);
    } else if (item == "json") {
      out.insert(ReportFormat::Json);
    } else if (item == "svg") {
      out.insert(ReportFormat::Svg);
    } else if (!item.empty()) {
      throw Error(ErrorKind::ConfigInvalid, "formats: unknown format '" + item + "'");
    }
    pos = end + 1;
  }
  if (out.empty()) throw Error(ErrorKind::ConfigInvalid, "formats: empty format list");
  return out;
}

std::string results_json(const RunArtifacts& art) {
  json j;
  j["experiment"] = std::string(to_string(art.config.kind));
  if (!art.config.name.empty()) j["name"] = art.config.name;
  j["status"] = status_of(art);
  j["exit_code"] = art.exit_code();
  json metrics = json::object();
  for (const auto& [k, v] : art.metrics) metrics[k] = metric_json(v);
  j["metrics"] = metrics;
  j["labels"] = art.labels;
  json as = json::array();
  for (const auto& a : art.assertions) {
    json aj{{"metric", a.metric}, {"value", metric_json(a.value)}, {"passed", a.passed}};
    if (a.min) aj["min"] = *a.min;
    if (a.max) aj["max"] = *a.max;
    as.push_back(aj);
  }
  j["assertions"] = as;
  if (art.error_kind) {
    j["error"] = {{"kind", std::string(to_string(*art.error_kind))},
                  {"message", art.error_message}};
  }
  return j.dump(2) + "\n";
}

std::string render_svg(const ProfilePlot& plot) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < plot.radii.size() && i < plot.values.size(); ++i) {
    if (plot.radii[i] > 0.0 && plot.values[i] > 0.0) {
      pts.emplace_back(std::log10(plot.radii[i]), std::log10(plot.values[i]));
    }
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"15\">"
     << xml_escape(plot.name + ": " + plot.quantity + " vs radius") << "</text>\n";
  if (pts.empty()) {
    os << "<text x=\"" << W / 2 << "\" y=\"" << H / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\">no positive values</text>\n</svg>\n";
    return os.str();
  }
  double x0 = pts.front().first, x1 = x0, y0 = pts.front().second, y1 = y0;
  for (const auto& [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  x0 = std::floor(x0 * 2.0) / 2.0 - 0.1;
  x1 = std::ceil(x1 * 2.0) / 2.0 + 0.1;
  y0 = std::floor(y0 * 2.0) / 2.0 - 0.1;
  y1 = std::ceil(y1 * 2.0) / 2.0 + 0.1;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  os << "<g stroke=\"#444\" stroke-width=\"1\" fill=\"none\">\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << H - T - B << "\"/>\n</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#222\">\n";
  for (double d = std::ceil(x0); d <= x1; d += 1.0) {
    os << "<line x1=\"" << fmt("%.2f", sx(d)) << "\" y1=\"" << T << "\" x2=\"" << fmt("%.2f", sx(d))
       << "\" y2=\"" << H - B << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << fmt("%.2f", sx(d)) << "\" y=\"" << H - B + 16
       << "\" text-anchor=\"middle\">1e" << static_cast<int>(d) << "</text>\n";
  }
  for (double d = std::ceil(y0); d <= y1; d += 1.0) {
    os << "<line x1=\"" << L << "\" y1=\"" << fmt("%.2f", sy(d)) << "\" x2=\"" << W - R
       << "\" y2=\"" << fmt("%.2f", sy(d)) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << fmt("%.2f", sy(d) + 4)
       << "\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\">radius (log scale)</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\">" << xml_escape(plot.quantity) << " (log scale)</text>\n</g>\n";

  if (plot.fit) {
    const auto& f = *plot.fit;
    const double la = x0 + 0.1, lb = x1 - 0.1;
    const double ya = (f.log_constant + f.exponent * la * std::log(10.0)) / std::log(10.0);
    const double yb = (f.log_constant + f.exponent * lb * std::log(10.0)) / std::log(10.0);
    os << "<line x1=\"" << fmt("%.2f", sx(la)) << "\" y1=\"" << fmt("%.2f", sy(ya)) << "\" x2=\""
       << fmt("%.2f", sx(lb)) << "\" y2=\"" << fmt("%.2f", sy(yb))
       << "\" stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    os << "<text x=\"" << L + 10 << "\" y=\"" << T + 18
       << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#c0392b\">exponent = "
       << fmt("%.4f", f.exponent) << "  (R^2 = " << fmt("%.4f", f.r_squared) << ", k "
       << f.window.k_lo << ".." << f.window.k_hi << ")</text>\n";
  }
  os << "<g fill=\"#1f4e99\">\n";
  for (const auto& [x, y] : pts) {
    os << "<circle cx=\"" << fmt("%.2f", sx(x)) << "\" cy=\"" << fmt("%.2f", sy(y))
       << "\" r=\"4\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::vector<std::filesystem::path> emit_report(const RunArtifacts& art,
                                               const std::filesystem::path& out_dir,
                                               const std::set<ReportFormat>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> files;

  if (formats.count(ReportFormat::Json)) {
    const auto path = out_dir / "results.json";
    write_text(path, results_json(art));
    files.push_back(path);
  }
  if (formats.count(ReportFormat::Csv)) {
    for (const auto& t : art.tables) {
      std::ostringstream os;
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        os << (i ? "," : "") << csv_cell(t.columns[i]);
      }
      os << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
      }
      const auto path = out_dir / (t.name + ".csv");
      write_text(path, os.str());
      files.push_back(path);
    }
  }
  if (formats.count(ReportFormat::Svg)) {
    for (const auto& p : art.plots) {
      const auto path = out_dir / (p.name + ".svg");
      write_text(path, render_svg(p));
      files.push_back(path);
    }
  }
  if (art.field) {
    const auto path = out_dir / "field.hlf";
    write_field(path, *art.field);
    files.push_back(path);
  }

  json manifest;
  manifest["tool"] = "holderlab";
  manifest["version"] = std::string(kVersion);
  manifest["created_utc"] = utc_timestamp();
  manifest["status"] = status_of(art);
  manifest["exit_code"] = art.exit_code();
  manifest["seed"] = art.config.seed;
  manifest["config"] = json::parse(art.config.to_json());
  manifest["timings_seconds"] = art.timings;
  if (art.error_kind) {
    manifest["error"] = {{"kind", std::string(to_string(*art.error_kind))},
                         {"message", art.error_message}};
  }
  json summary = json::array();
  for (const auto& a : art.assertions) {
    summary.push_back({{"metric", a.metric}, {"passed", a.passed}});
  }
  manifest["summary"] = summary;
  json listed = json::array();
  for (const auto& f : files) listed.push_back(f.filename().string());
  manifest["files"] = listed;
  const auto path = out_dir / "manifest.json";
  write_text(path, manifest.dump(2) + "\n");
  files.push_back(path);
  return files;
}

}  // namespace holderlab
