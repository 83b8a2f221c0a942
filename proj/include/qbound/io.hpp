#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "qbound/chained.hpp"
#include "qbound/experiment.hpp"
#include "qbound/nonsignaling.hpp"

namespace qbound {

/// Malformed input; what() carries the line/field diagnostic.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class FileFormat { csv, json };

/// CSV schema: a `# d=<d> N=<N> integration_s=<t>` header (plus an optional
/// `# meta=...` line), the `A,B,x,y,count` column row, then one integer row
/// per cell. Every (A,B) slice must be complete.
void save_counts_csv(const CountRecord& rec, std::ostream& out);
CountRecord load_counts_csv(std::istream& in);

/// JSON schema: {dim, n_settings, integration_s, counts:[{a,b,table:[[..]]}], meta}.
void save_counts_json(const CountRecord& rec, std::ostream& out);
CountRecord load_counts_json(std::istream& in);

void save_counts(const CountRecord& rec, const std::string& path, FileFormat format);
CountRecord load_counts(const std::string& path, FileFormat format);
/// Picks the format from the file extension (.json vs anything else = csv).
CountRecord load_counts_auto(const std::string& path);

/// NSBox as JSON with the table in nested arrays, row-major over
/// (a, b, c, x, y, z).
void save_box_json(const NSBox& box, std::ostream& out);
NSBox load_box_json(std::istream& in);

/// Scan summary emitted by the simulate/analyze commands.
struct ScanSummary {
    int dim = 0;
    MinimumScan scan;
    std::optional<double> margin_bm_analytic;
    std::optional<double> margin_bm_bruteforce;
    std::optional<double> margin_lm;
};

std::string summary_to_json(const ScanSummary& summary);

/// Plot-ready CSV rows `N,value,stderr`.
void save_scan_csv(const MinimumScan& scan, std::ostream& out);

/// %.12g with stable formatting for byte-identical reruns.
std::string format_double(double v);

}  // namespace qbound
