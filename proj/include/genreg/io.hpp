#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "genreg/dataset.hpp"
#include "genreg/errors.hpp"
#include "genreg/model_mask.hpp"
#include "genreg/schema.hpp"
#include "genreg/simulate.hpp"

namespace genreg {

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline bool parse_double(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + tok.size();
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << std::setprecision(17);
    return out;
}

}  // namespace detail

// CSV dataset: one row per observation, last column is the response.
// Unless no_header is set, the first line is treated as a header when any
// of its fields fails to parse as a number.
inline Dataset load_dataset_csv(std::istream& in, bool no_header = false) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> names;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> toks = detail::split_csv_line(line);
        if (first && !no_header) {
            bool all_numeric = true;
            double tmp;
            for (const std::string& t : toks)
                if (!detail::parse_double(t, tmp)) {
                    all_numeric = false;
                    break;
                }
            first = false;
            if (!all_numeric) {
                names = toks;
                continue;
            }
        }
        first = false;
        std::vector<double> row(toks.size());
        for (size_t j = 0; j < toks.size(); ++j)
            if (!detail::parse_double(toks[j], row[j]))
                throw ConfigError("dataset: non-numeric field '" + toks[j] +
                                  "'");
        if (!rows.empty() && row.size() != rows.front().size())
            throw ConfigError("dataset: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("dataset: no data rows");
    if (rows.front().size() < 2)
        throw ConfigError("dataset: need at least one predictor column");

    const int n = static_cast<int>(rows.size());
    const int d = static_cast<int>(rows.front().size()) - 1;
    Dataset data;
    data.X.resize(n, d);
    data.Y.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) data.X(i, j) = rows[size_t(i)][size_t(j)];
        data.Y[i] = rows[size_t(i)][size_t(d)];
    }
    if (!names.empty() && names.size() == size_t(d) + 1) {
        names.pop_back();
        data.column_names = names;
    } else {
        data.column_names.resize(size_t(d));
        for (int j = 0; j < d; ++j)
            data.column_names[size_t(j)] = "x" + std::to_string(j + 1);
    }
    data.validate();
    return data;
}

inline Dataset load_dataset_csv_file(const std::string& path,
                                     bool no_header = false) {
    std::ifstream in = detail::open_input(path);
    return load_dataset_csv(in, no_header);
}

// One 0/1 string per line; blank lines skipped.
inline std::vector<ModelMask> load_masks(std::istream& in) {
    std::vector<ModelMask> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = detail::trim(line);
        if (t.empty()) continue;
        out.push_back(ModelMask::from_string(t));
        if (out.back().dimension() != out.front().dimension())
            throw ConfigError("mask file: inconsistent lengths");
    }
    if (out.empty()) throw ConfigError("mask file: no masks");
    return out;
}

inline std::vector<ModelMask> load_masks_file(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    return load_masks(in);
}

inline void write_masks_file(const std::string& path,
                             const std::vector<ModelMask>& masks) {
    std::ofstream out = detail::open_output(path);
    for (const ModelMask& m : masks) out << m.to_string() << "\n";
}

// One {0,1,*} pattern per line.
inline std::vector<Schema> load_schemata(std::istream& in) {
    std::vector<Schema> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = detail::trim(line);
        if (t.empty()) continue;
        out.push_back(Schema::from_string(t));
        if (out.back().dimension() != out.front().dimension())
            throw ConfigError("schema file: inconsistent lengths");
    }
    if (out.empty()) throw ConfigError("schema file: no schemata");
    return out;
}

inline std::vector<Schema> load_schemata_file(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    return load_schemata(in);
}

// 2^d lines; line i holds the fitness of the mask whose bit j equals
// (i >> j) & 1.
inline std::vector<double> load_fitness_table(std::istream& in) {
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = detail::trim(line);
        if (t.empty()) continue;
        double v;
        if (!detail::parse_double(t, v))
            throw ConfigError("fitness table: non-numeric line '" + t + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("fitness table: empty");
    size_t sz = out.size();
    if ((sz & (sz - 1)) != 0)
        throw ConfigError("fitness table: line count must be a power of two");
    return out;
}

inline std::vector<double> load_fitness_table_file(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    return load_fitness_table(in);
}

inline void write_metrics_csv(const ExperimentReport& report,
                              const std::string& path) {
    std::ofstream out = detail::open_output(path);
    out << "case,replicate,metric,value\n";
    for (const MetricRow& r : report.rows)
        out << r.case_id << "," << r.replicate << "," << r.metric << ","
            << r.value << "\n";
}

inline void write_soil_csv(const ExperimentReport& report,
                           const std::string& path) {
    std::ofstream out = detail::open_output(path);
    out << "case,replicate,variable,value\n";
    for (const SoilRow& r : report.soil_rows)
        out << r.case_id << "," << r.replicate << "," << r.variable << ","
            << r.value << "\n";
}

inline nlohmann::json experiment_summary_json(const ExperimentReport& report) {
    nlohmann::json cases = nlohmann::json::array();
    for (const CaseSpec& c : report.config.cases)
        cases.push_back({{"case", c.case_id},
                         {"n", c.n},
                         {"d", c.d},
                         {"s", c.s},
                         {"rho", c.rho}});
    nlohmann::json aggs = nlohmann::json::array();
    for (const MetricAggregate& a : report.aggregates)
        aggs.push_back({{"case", a.case_id},
                        {"metric", a.metric},
                        {"mean", a.mean},
                        {"sd", a.sd},
                        {"count", a.count}});
    return nlohmann::json{
        {"cases", cases},
        {"replicates", report.config.replicates},
        {"master_seed", report.config.master_seed},
        {"sms_alpha", report.config.sms_alpha},
        {"sms_resamples", report.config.sms_resamples},
        {"aggregates", aggs}};
}

inline void write_summary_json(const ExperimentReport& report,
                               const std::string& path) {
    std::ofstream out = detail::open_output(path);
    out << experiment_summary_json(report).dump(2) << "\n";
}

}  // namespace genreg
