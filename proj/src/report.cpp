#include "dowg/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dowg/errors.hpp"

namespace dowg {

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

std::string format_eoc(const std::optional<double>& eoc) {
  if (!eoc) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *eoc);
  return buf;
}

namespace {

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string fmt(double v, const char* spec = "%.1f") {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

struct LogFrame {
  double x0, x1, y0, y1;  // log10 ranges
  double left = 80, right = 600, top = 40, bottom = 420;

  double px(double x) const { return left + (std::log10(x) - x0) / (x1 - x0) * (right - left); }
  double py(double y) const { return bottom - (std::log10(y) - y0) / (y1 - y0) * (bottom - top); }
};

LogFrame make_frame(double xmin, double xmax, double ymin, double ymax) {
  LogFrame f{std::log10(xmin), std::log10(xmax), std::log10(ymin), std::log10(ymax)};
  if (f.x1 - f.x0 < 1e-12) {
    f.x0 -= 0.5;
    f.x1 += 0.5;
  }
  if (f.y1 - f.y0 < 1e-12) {
    f.y0 -= 0.5;
    f.y1 += 0.5;
  }
  const double px = 0.05 * (f.x1 - f.x0), py = 0.05 * (f.y1 - f.y0);
  f.x0 -= px;
  f.x1 += px;
  f.y0 -= py;
  f.y1 += py;
  return f;
}

void svg_axes(std::ostream& out, const LogFrame& f, const std::string& xlabel, const std::string& ylabel) {
  out << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.right - f.left << "\" height=\""
      << f.bottom - f.top << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int d = static_cast<int>(std::ceil(f.x0)); d <= static_cast<int>(std::floor(f.x1)); ++d) {
    const double x = f.px(std::pow(10.0, d));
    out << "<text x=\"" << fmt(x) << "\" y=\"" << f.bottom + 18 << "\" font-size=\"12\" text-anchor=\"middle\">1e"
        << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(f.y0)); d <= static_cast<int>(std::floor(f.y1)); ++d) {
    const double y = f.py(std::pow(10.0, d));
    out << "<text x=\"" << f.left - 6 << "\" y=\"" << fmt(y + 4) << "\" font-size=\"12\" text-anchor=\"end\">1e" << d
        << "</text>\n";
  }
  out << "<text x=\"" << (f.left + f.right) / 2 << "\" y=\"" << f.bottom + 38
      << "\" font-size=\"13\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"20\" y=\"" << (f.top + f.bottom) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << (f.top + f.bottom) / 2 << ")\">" << ylabel << "</text>\n";
}

std::string file_stem_token(const ConvergenceReport& r) { return r.scheme.name(); }

}  // namespace

std::string report_label(const ConvergenceReport& r, const std::vector<ConvergenceReport>& all) {
  std::set<std::string> schemes;
  std::set<int> orders;
  for (const auto& a : all) {
    schemes.insert(a.scheme.name());
    orders.insert(a.k);
  }
  std::string label;
  if (schemes.size() > 1 || orders.size() == 1) label = upper(r.scheme.name());
  if (orders.size() > 1) label += (label.empty() ? "" : " ") + std::string("Q") + std::to_string(r.k);
  return label;
}

void write_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "inv_h,error,eoc\n";
  for (const auto& row : report.rows) out << row.inv_h << ',' << format_sci(row.error) << ',' << format_eoc(row.eoc) << '\n';
}

void write_markdown(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  std::set<int> inv_h;
  for (const auto& r : reports)
    for (const auto& row : r.rows) inv_h.insert(row.inv_h);
  out << "| 1/h |";
  for (const auto& r : reports) out << ' ' << report_label(r, reports) << " error | eoc |";
  out << "\n|---:|";
  for (std::size_t i = 0; i < reports.size(); ++i) out << "---:|---:|";
  out << '\n';
  for (int n : inv_h) {
    out << "| " << n << " |";
    for (const auto& r : reports) {
      const auto it = std::find_if(r.rows.begin(), r.rows.end(), [n](const LevelRow& row) { return row.inv_h == n; });
      if (it == r.rows.end()) {
        out << "  |  |";
      } else {
        const std::string eoc = it->eoc ? format_eoc(it->eoc) : "--";
        out << ' ' << format_sci(it->error) << " | " << eoc << " |";
      }
    }
    out << '\n';
  }
}

void write_svg(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  double xmin = 1e300, xmax = 0, ymin = 1e300, ymax = 0;
  for (const auto& r : reports)
    for (const auto& row : r.rows) {
      const double h = 1.0 / row.inv_h;
      xmin = std::min(xmin, h);
      xmax = std::max(xmax, h);
      if (row.error > 0) {
        ymin = std::min(ymin, row.error);
        ymax = std::max(ymax, row.error);
      }
    }
  const int k = reports.empty() ? 1 : reports.front().k;
  const double slopes[2] = {k + 0.5, k + 1.0};
  // reference lines start half a step below the coarsest point of the first series
  double h0 = 1, e0 = 1;
  bool have_anchor = false;
  for (const auto& r : reports)
    for (const auto& row : r.rows)
      if (!have_anchor && row.error > 0) {
        h0 = 1.0 / row.inv_h;
        e0 = 0.5 * row.error;
        have_anchor = true;
      }
  if (!have_anchor) {
    xmin = 1.0 / 128;
    xmax = 1.0 / 8;
    ymin = 1e-6;
    ymax = 1e-1;
    h0 = xmax;
    e0 = 1e-2;
  }
  for (double p : slopes) {
    const double e1 = e0 * std::pow(xmin / h0, p);
    ymin = std::min({ymin, e0, e1});
    ymax = std::max({ymax, e0, e1});
  }
  const LogFrame f = make_frame(xmin, xmax, ymin, ymax);

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"680\" height=\"480\" viewBox=\"0 0 680 480\">\n";
  out << "<rect width=\"680\" height=\"480\" fill=\"white\"/>\n";
  svg_axes(out, f, "h", "error");
  for (int i = 0; i < 2; ++i) {
    const double e1 = e0 * std::pow(xmin / h0, slopes[i]);
    out << "<line class=\"reference\" x1=\"" << fmt(f.px(h0)) << "\" y1=\"" << fmt(f.py(e0)) << "\" x2=\""
        << fmt(f.px(xmin)) << "\" y2=\"" << fmt(f.py(e1)) << "\" stroke=\"#888\" stroke-dasharray=\""
        << (i == 0 ? "6,4" : "2,3") << "\"/>\n";
    out << "<text x=\"" << fmt(f.px(xmin) + 4) << "\" y=\"" << fmt(f.py(e1) + (i == 0 ? -4 : 12))
        << "\" font-size=\"11\" fill=\"#555\">slope " << fmt(slopes[i]) << "</text>\n";
  }
  for (std::size_t s = 0; s < reports.size(); ++s) {
    const char* color = kColors[s % 5];
    out << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& row : reports[s].rows) {
      if (!(row.error > 0)) continue;
      out << (first ? "" : " ") << fmt(f.px(1.0 / row.inv_h)) << ',' << fmt(f.py(row.error));
      first = false;
    }
    out << "\"/>\n";
    out << "<text x=\"" << f.right + 8 << "\" y=\"" << f.top + 16 + 18 * s << "\" font-size=\"12\" fill=\"" << color
        << "\">" << report_label(reports[s], reports) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_angular_csv(std::ostream& out, const AngularStudy& study) {
  out << "M,error\n";
  for (const auto& row : study.rows) out << row.M << ',' << format_sci(row.error) << '\n';
}

void write_angular_markdown(std::ostream& out, const AngularStudy& study) {
  out << "| M | error |\n|---:|---:|\n";
  for (const auto& row : study.rows) out << "| " << row.M << " | " << format_sci(row.error) << " |\n";
}

void write_angular_svg(std::ostream& out, const AngularStudy& study) {
  double xmin = 1e300, xmax = 0, ymin = 1e300, ymax = 0;
  for (const auto& row : study.rows) {
    xmin = std::min(xmin, static_cast<double>(row.M));
    xmax = std::max(xmax, static_cast<double>(row.M));
    if (row.error > 0) {
      ymin = std::min(ymin, row.error);
      ymax = std::max(ymax, row.error);
    }
  }
  if (study.rows.empty() || ymax == 0) {
    xmin = 2;
    xmax = 64;
    ymin = 1e-6;
    ymax = 1e-1;
  }
  const LogFrame f = make_frame(xmin, xmax, ymin, ymax);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"680\" height=\"480\" viewBox=\"0 0 680 480\">\n";
  out << "<rect width=\"680\" height=\"480\" fill=\"white\"/>\n";
  svg_axes(out, f, "M", "error");
  out << "<polyline class=\"series\" fill=\"none\" stroke=\"" << kColors[0] << "\" stroke-width=\"2\" points=\"";
  bool first = true;
  for (const auto& row : study.rows) {
    if (!(row.error > 0)) continue;
    out << (first ? "" : " ") << fmt(f.px(row.M)) << ',' << fmt(f.py(row.error));
    first = false;
  }
  out << "\"/>\n</svg>\n";
}

std::string output_stem(const std::string& command, const std::string& case_name, const std::string& scheme, int k) {
  return command + "_" + case_name + "_" + scheme + "_Q" + std::to_string(k);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& outdir) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec || !std::filesystem::is_directory(outdir))
    throw IoError("cannot create output directory " + outdir.string() + (ec ? ": " + ec.message() : ""));
}

std::vector<std::filesystem::path> emit_reports(const std::vector<ConvergenceReport>& reports,
                                                const std::string& command, const std::vector<OutputFormat>& formats,
                                                const std::filesystem::path& outdir) {
  if (reports.empty()) throw std::invalid_argument("emit_reports: no reports");
  ensure_dir(outdir);
  std::vector<std::filesystem::path> written;
  const ConvergenceReport& first = reports.front();
  const std::string combined_scheme = reports.size() == 1 ? file_stem_token(first) : "all";
  const std::string stem = output_stem(command, first.case_name, combined_scheme, first.k);
  for (OutputFormat fmt_kind : formats) {
    if (fmt_kind == OutputFormat::Csv) {
      for (const auto& r : reports) {
        std::ostringstream s;
        write_csv(s, r);
        const auto path = outdir / (output_stem(command, r.case_name, file_stem_token(r), r.k) + ".csv");
        write_text_file(path, s.str());
        written.push_back(path);
      }
    } else {
      std::ostringstream s;
      if (fmt_kind == OutputFormat::Markdown) {
        write_markdown(s, reports);
      } else {
        write_svg(s, reports);
      }
      const auto path = outdir / (stem + (fmt_kind == OutputFormat::Markdown ? ".md" : ".svg"));
      write_text_file(path, s.str());
      written.push_back(path);
    }
  }
  return written;
}

std::vector<std::filesystem::path> emit_angular(const AngularStudy& study, const std::vector<OutputFormat>& formats,
                                                const std::filesystem::path& outdir) {
  ensure_dir(outdir);
  std::vector<std::filesystem::path> written;
  const std::string stem = output_stem("angular-study", study.case_name, study.scheme.name(), study.k);
  for (OutputFormat f : formats) {
    std::ostringstream s;
    std::string ext;
    switch (f) {
      case OutputFormat::Csv:
        write_angular_csv(s, study);
        ext = ".csv";
        break;
      case OutputFormat::Markdown:
        write_angular_markdown(s, study);
        ext = ".md";
        break;
      case OutputFormat::Svg:
        write_angular_svg(s, study);
        ext = ".svg";
        break;
    }
    const auto path = outdir / (stem + ext);
    write_text_file(path, s.str());
    written.push_back(path);
  }
  return written;
}

}  // namespace dowg
