#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "focsolve/diagnostics.hpp"
#include "focsolve/focp.hpp"
#include "focsolve/optim.hpp"
#include "focsolve/transcribe.hpp"

namespace focsolve {

// A file that could not be opened or read.
struct FileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A file whose contents violate the expected format.  `line` is 1-based;
// `column` is 1-based when known, 0 otherwise.  The message already includes
// the location.
struct FileFormatError : std::runtime_error {
    int line;
    int column;
    FileFormatError(const std::string& msg, int line_, int column_ = 0)
        : std::runtime_error(msg), line(line_), column(column_) {}
};

// Problem document: one `key = value` per line, `#` starts a comment, blank
// lines ignored.  Keys: alpha, M, N, a, b, x_a, x_b (optional), L, f.
// L and f are expression strings in (t, x, u).  Throws FileFormatError for
// malformed text (missing/duplicate/unknown keys, bad numbers, expression
// syntax errors with line and column); problem validation failures propagate
// from the Focp constructor.
Focp parse_problem(std::string_view text);

// Reads and parses a problem file; FileError when unreadable.
Focp read_problem(const std::string& path);

// Formats a value with 12 significant digits in plain decimal notation
// (never scientific); 0 formats as "0".
std::string format_sig12(double value);

// Trajectory file: header `t,x,u,V_2,...,V_K`, then n+1 comma-separated data
// rows (one per node).  The control column is blank on the final row since
// u_i is active on [t_i, t_{i+1}).  All values in 12-significant-digit
// decimal notation.  Writing is deterministic: identical trajectories give
// byte-identical files.
void write_trajectory(std::ostream& os, const Trajectory& traj);
void write_trajectory_file(const std::string& path, const Trajectory& traj);

// Reads a trajectory file back; the grid is reconstructed from the time
// column (which must be uniform).  Throws FileFormatError on malformed
// content, FileError when the file cannot be opened.
Trajectory read_trajectory(std::istream& is);
Trajectory read_trajectory_file(const std::string& path);

// Data assembled by a solver run for the report artifact.
struct RunReportData {
    std::string mode;  // "full" or "shooting"
    int K = 0;
    int n = 0;
    bool offset_grid = false;
    SolveReport solve;
    double M2 = 1.0;          // curvature scale used for the truncation bound
    bool M2_supplied = false;  // false: the default M2 = 1 was assumed
    double error_bound_value = 0.0;
    std::optional<PontryaginReport> pontryagin;  // full mode only
};

// Report file: `key = value` lines with `#` comment headers (same dialect as
// the problem file).  Deterministic for identical inputs.
void write_report(std::ostream& os, const RunReportData& data);
void write_report_file(const std::string& path, const RunReportData& data);

}  // namespace focsolve
