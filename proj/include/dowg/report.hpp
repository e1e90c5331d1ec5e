#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dowg/verify.hpp"

namespace dowg {

/// Scientific notation with four decimals, e.g. 8.5643e-02.
std::string format_sci(double v);
/// Two decimals; empty when absent.
std::string format_eoc(const std::optional<double>& eoc);

/// Column label of a report inside a combined table: the scheme name when
/// the reports differ in scheme, "Q<k>" when they differ in order.
std::string report_label(const ConvergenceReport& r, const std::vector<ConvergenceReport>& all);

/// Header "inv_h,error,eoc", one row per level, eoc blank in the first row.
void write_csv(std::ostream& out, const ConvergenceReport& report);

/// Table with columns 1/h, then "<label> error" and "eoc" per report.
void write_markdown(std::ostream& out, const std::vector<ConvergenceReport>& reports);

/// Log-log plot of error against h: one polyline per report plus reference
/// slope lines of order k+1/2 and k+1 (k of the first report).
void write_svg(std::ostream& out, const std::vector<ConvergenceReport>& reports);

/// Header "M,error".
void write_angular_csv(std::ostream& out, const AngularStudy& study);
void write_angular_markdown(std::ostream& out, const AngularStudy& study);
/// Log-log plot of error against M, one polyline.
void write_angular_svg(std::ostream& out, const AngularStudy& study);

enum class OutputFormat { Csv, Markdown, Svg };

/// File stem `<command>_<case>_<scheme>_Q<k>`.
std::string output_stem(const std::string& command, const std::string& case_name, const std::string& scheme, int k);

/// Writes the requested formats into outdir (created if missing). For more
/// than one report, CSV files are written per report and the markdown/SVG
/// files use the scheme token "all". Throws IoError when a file cannot be
/// written. Returns the written paths.
std::vector<std::filesystem::path> emit_reports(const std::vector<ConvergenceReport>& reports,
                                                const std::string& command, const std::vector<OutputFormat>& formats,
                                                const std::filesystem::path& outdir);

std::vector<std::filesystem::path> emit_angular(const AngularStudy& study, const std::vector<OutputFormat>& formats,
                                                const std::filesystem::path& outdir);

/// Creates outdir if needed; throws IoError when that fails.
void ensure_dir(const std::filesystem::path& outdir);

/// Writes text to a file, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dowg
