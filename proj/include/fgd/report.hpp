// Report emission: exact cells printed both as a rational string and a
// 12-significant-digit decimal; CSV with a config-echo prelude, JSON, and
// two-column plot data with a generated gnuplot script.
#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace fgd {

inline std::string decimal_string(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string decimal_string(const mpq_class& q) { return decimal_string(q.get_d()); }

inline std::string rational_string(const mpz_class& num, const mpz_class& den) {
    return num.get_str() + "/" + den.get_str();
}

inline std::string rational_string(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct ReportTable {
    ConfigEcho config;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// CSV dialect: comma separated, header row, LF endings; the resolved run
// configuration is echoed as '#' comment lines ahead of the header.
inline void write_csv(std::ostream& os, const ReportTable& t) {
    for (const auto& [key, value] : t.config) os << "# " << key << "=" << value << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default: out += c;
        }
    }
    return out;
}

inline void write_json(std::ostream& os, const ReportTable& t) {
    os << "{\n  \"config\": {";
    for (std::size_t i = 0; i < t.config.size(); ++i)
        os << (i ? ", " : "") << "\"" << json_escape(t.config[i].first) << "\": \""
           << json_escape(t.config[i].second) << "\"";
    os << "},\n  \"columns\": [";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? ", " : "") << "\"" << json_escape(t.columns[i]) << "\"";
    os << "],\n  \"rows\": [\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        os << "    [";
        for (std::size_t i = 0; i < t.rows[r].size(); ++i)
            os << (i ? ", " : "") << "\"" << json_escape(t.rows[r][i]) << "\"";
        os << "]" << (r + 1 < t.rows.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
}

// <prefix>.dat (x y pairs) plus <prefix>.gp rendering it against an
// optional horizontal target; no plotting dependency in the artifact.
inline void write_plot_data(const std::string& prefix, const ReportTable& t,
                            std::size_t x_col, std::size_t y_col, double target,
                            bool has_target) {
    std::ofstream dat(prefix + ".dat");
    if (!dat) throw std::runtime_error("cannot write " + prefix + ".dat");
    dat << "# " << t.columns[x_col] << " " << t.columns[y_col] << "\n";
    for (const auto& row : t.rows) dat << row[x_col] << " " << row[y_col] << "\n";

    std::ofstream gp(prefix + ".gp");
    if (!gp) throw std::runtime_error("cannot write " + prefix + ".gp");
    gp << "set xlabel '" << t.columns[x_col] << "'\n";
    gp << "set ylabel '" << t.columns[y_col] << "'\n";
    gp << "set grid\n";
    if (has_target)
        gp << "plot '" << prefix << ".dat' using 1:2 with linespoints title 'computed', \\\n"
           << "     " << decimal_string(target) << " with lines title 'limit'\n";
    else
        gp << "plot '" << prefix << ".dat' using 1:2 with linespoints title 'computed'\n";
}

}  // namespace fgd
