#include "focsolve/problem_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

namespace focsolve {

namespace {

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double parse_number(std::string_view value, std::string_view key, int line) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw FileFormatError("line " + std::to_string(line) + ": invalid number '" +
                                  std::string(value) + "' for key '" + std::string(key) + "'",
                              line);
    return out;
}

struct RawEntry {
    std::string value;
    int line = 0;
    int column = 0;  // 1-based column of the value's first character
};

Expr parse_expression_entry(const RawEntry& entry, std::string_view key) {
    try {
        return parse_expr(entry.value);
    } catch (const ParseError& pe) {
        const int column = entry.column + static_cast<int>(pe.offset);
        throw FileFormatError("line " + std::to_string(entry.line) + ", column " +
                                  std::to_string(column) + ": in expression for key '" +
                                  std::string(key) + "': " + pe.what(),
                              entry.line, column);
    }
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(trim(line.substr(start)));
            return fields;
        }
        fields.emplace_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

Focp parse_problem(std::string_view text) {
    static const std::set<std::string, std::less<>> number_keys = {"alpha", "M",   "N",
                                                                   "a",     "b",  "x_a",
                                                                   "x_b"};
    std::map<std::string, double, std::less<>> numbers;
    std::map<std::string, RawEntry, std::less<>> expressions;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        ++line_no;
        const std::size_t line_start = pos;
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;

        std::string_view body = raw.substr(0, raw.find('#'));
        if (trim(body).empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw FileFormatError(
                "line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                    std::string(trim(body)) + "'",
                line_no);
        const std::string key(trim(body.substr(0, eq)));
        const std::string_view value = trim(body.substr(eq + 1));
        if (key.empty())
            throw FileFormatError("line " + std::to_string(line_no) + ": missing key before '='",
                                  line_no);
        if (value.empty())
            throw FileFormatError(
                "line " + std::to_string(line_no) + ": empty value for key '" + key + "'",
                line_no);
        if (numbers.count(key) || expressions.count(key))
            throw FileFormatError(
                "line " + std::to_string(line_no) + ": duplicate key '" + key + "'", line_no);
        if (number_keys.count(key)) {
            numbers.emplace(key, parse_number(value, key, line_no));
        } else if (key == "L" || key == "f") {
            RawEntry entry;
            entry.value = std::string(value);
            entry.line = line_no;
            entry.column =
                static_cast<int>(value.data() - (text.data() + line_start)) + 1;
            expressions.emplace(key, std::move(entry));
        } else {
            throw FileFormatError(
                "line " + std::to_string(line_no) + ": unknown key '" + key + "'", line_no);
        }
    }

    for (const char* required : {"alpha", "M", "N", "a", "b", "x_a"})
        if (!numbers.count(required))
            throw FileFormatError(std::string("missing required key '") + required + "'", 0);
    for (const char* required : {"L", "f"})
        if (!expressions.count(required))
            throw FileFormatError(std::string("missing required key '") + required + "'", 0);

    const Expr L = parse_expression_entry(expressions.at("L"), "L");
    const Expr f = parse_expression_entry(expressions.at("f"), "f");
    std::optional<double> x_b;
    if (auto it = numbers.find("x_b"); it != numbers.end()) x_b = it->second;
    return Focp(FractionalOrder(numbers.at("alpha")), numbers.at("M"), numbers.at("N"),
                numbers.at("a"), numbers.at("b"), numbers.at("x_a"), x_b, L, f);
}

Focp read_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open problem file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_problem(buffer.str());
}

std::string format_sig12(double value) {
    if (value == 0.0) return "0";
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    int decimals = 11 - static_cast<int>(std::floor(std::log10(std::fabs(value))));
    decimals = std::clamp(decimals, 0, 40);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

void write_trajectory(std::ostream& os, const Trajectory& traj) {
    const int n = traj.grid.n;
    os << "t,x,u";
    for (std::size_t j = 0; j < traj.V.size(); ++j) os << ",V_" << (j + 2);
    os << '\n';
    for (int i = 0; i <= n; ++i) {
        os << format_sig12(traj.grid.node(i)) << ',' << format_sig12(traj.x[i]) << ',';
        if (i < n) os << format_sig12(traj.u[i]);
        for (std::size_t j = 0; j < traj.V.size(); ++j) os << ',' << format_sig12(traj.V[j][i]);
        os << '\n';
    }
}

void write_trajectory_file(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot open output file for writing: " + path);
    write_trajectory(out, traj);
    out.flush();
    if (!out) throw FileError("failed while writing trajectory file: " + path);
}

Trajectory read_trajectory(std::istream& is) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    int line_no = 0;
    std::size_t expected_fields = 0;
    std::size_t v_count = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (!header_seen) {
            if (fields.size() < 3 || fields[0] != "t" || fields[1] != "x" || fields[2] != "u")
                throw FileFormatError("line " + std::to_string(line_no) +
                                          ": trajectory header must start with 't,x,u'",
                                      line_no);
            for (std::size_t j = 3; j < fields.size(); ++j)
                if (fields[j] != "V_" + std::to_string(j - 1))
                    throw FileFormatError("line " + std::to_string(line_no) +
                                              ": expected header column 'V_" +
                                              std::to_string(j - 1) + "', got '" + fields[j] +
                                              "'",
                                          line_no);
            expected_fields = fields.size();
            v_count = fields.size() - 3;
            header_seen = true;
            continue;
        }
        if (fields.size() != expected_fields)
            throw FileFormatError("line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(expected_fields) + " fields, got " +
                                      std::to_string(fields.size()),
                                  line_no);
        rows.push_back(std::move(fields));
    }
    if (!header_seen) throw FileFormatError("trajectory file is empty", 0);
    if (rows.size() < 3)
        throw FileFormatError("trajectory file must contain at least 3 data rows, got " +
                                  std::to_string(rows.size()),
                              0);

    const int n = static_cast<int>(rows.size()) - 1;
    auto field_number = [](const std::string& text, const char* what,
                           std::size_t row_index) -> double {
        double out = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw FileFormatError("data row " + std::to_string(row_index) + ": invalid " +
                                      std::string(what) + " value '" + text + "'",
                                  0);
        return out;
    };

    std::vector<double> t(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) t[i] = field_number(rows[i][0], "time", i);
    const double a = t.front();
    const double b = t.back();
    if (!(b > a)) throw FileFormatError("trajectory time column must be increasing", 0);
    const double dt = (b - a) / n;
    const double tol = 1e-8 * (1.0 + std::fabs(a) + std::fabs(b));
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (std::fabs(t[i] - (a + static_cast<double>(i) * dt)) > tol)
            throw FileFormatError("data row " + std::to_string(i) +
                                      ": time column is not a uniform grid",
                                  0);

    Trajectory traj{Grid(a, b, n), {}, {}, {}};
    traj.x.resize(rows.size());
    traj.u.resize(static_cast<std::size_t>(n));
    traj.V.assign(v_count, std::vector<double>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        traj.x[i] = field_number(rows[i][1], "state", i);
        const bool last = (i == rows.size() - 1);
        if (last) {
            if (!rows[i][2].empty())
                throw FileFormatError(
                    "data row " + std::to_string(i) +
                        ": control column must be blank on the final row",
                    0);
        } else {
            traj.u[i] = field_number(rows[i][2], "control", i);
        }
        for (std::size_t j = 0; j < v_count; ++j)
            traj.V[j][i] = field_number(rows[i][3 + j], "moment state", i);
    }
    return traj;
}

Trajectory read_trajectory_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open trajectory file: " + path);
    return read_trajectory(in);
}

void write_report(std::ostream& os, const RunReportData& data) {
    os << "# focsolve run report\n";
    os << "mode = " << data.mode << '\n';
    os << "K = " << data.K << '\n';
    os << "n = " << data.n << '\n';
    os << "grid = " << (data.offset_grid ? "offset" : "standard") << '\n';
    os << "converged = " << (data.solve.converged ? "true" : "false") << '\n';
    os << "objective = " << format_g12(data.solve.objective) << '\n';
    os << "max_constraint_violation = " << format_g12(data.solve.max_constraint_violation)
       << '\n';
    os << "first_order_residual = " << format_g12(data.solve.first_order_residual) << '\n';
    os << "outer_iterations = " << data.solve.outer_iterations << '\n';
    os << "inner_iterations = " << data.solve.inner_iterations << '\n';
    os << "# truncation bound for the moment expansion over this (alpha, K, b - a),\n"
       << "# proportional to M2 = sup|x''| ("
       << (data.M2_supplied ? "user-supplied" : "assumed 1; pass --M2 to rescale") << ")\n";
    os << "M2 = " << format_g12(data.M2) << '\n';
    os << "error_bound = " << format_g12(data.error_bound_value) << '\n';
    if (data.pontryagin) {
        const PontryaginReport& p = *data.pontryagin;
        os << "# Pontryagin certificate; " << p.convention_note << '\n';
        os << "stationarity_residual = " << format_g12(p.stationarity_residual) << '\n';
        os << "costate_defect = " << format_g12(p.costate_defect) << '\n';
        for (std::size_t k = 0; k < p.transversality.size(); ++k)
            os << "lambda_" << (k + 1) << "_terminal = " << format_g12(p.transversality[k])
               << '\n';
        os << "endpoint = " << (p.endpoint_free ? "free" : "fixed") << '\n';
    }
}

void write_report_file(const std::string& path, const RunReportData& data) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot open output file for writing: " + path);
    write_report(out, data);
    out.flush();
    if (!out) throw FileError("failed while writing report file: " + path);
}

}  // namespace focsolve
