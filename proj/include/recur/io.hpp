#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recur/pattern_recognition.hpp"

namespace recur {

// Shortest round-trippable decimal rendering used everywhere numbers are
// written out, so identical runs produce identical bytes.
inline std::string to_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& tok, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string(what) + ": bad number '" + tok + "'");
    }
}

// Newline-delimited numeric series, one value per line, most recent value
// last. Blank lines, surrounding whitespace, and '#' comment lines are
// tolerated, so a generated file (with its self-description header) reads
// straight back in.
inline std::vector<double> read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file: " + path);
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = line;
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
        std::size_t start = 0;
        while (start < t.size() && std::isspace(static_cast<unsigned char>(t[start]))) ++start;
        t = t.substr(start);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(parse_double(t, "series"));
    }
    return out;
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Labeled CSV with columns x_1,...,x_d,y. An optional header row is
// detected by a non-numeric first field; '#' comment lines are skipped.
// Every row carries a 0/1 label except the final row, whose empty label
// marks it as the query point.
inline labeled_series read_labeled_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labeled file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t first_ch = 0;
        while (first_ch < line.size() &&
               std::isspace(static_cast<unsigned char>(line[first_ch])))
            ++first_ch;
        if (first_ch == line.size() || line[first_ch] == '#') continue;
        rows.push_back(split_csv_row(line));
    }
    if (rows.empty()) throw std::runtime_error("labeled file is empty: " + path);
    std::size_t first = 0;
    try {
        parse_double(rows[0][0], "labeled");
    } catch (const std::exception&) {
        first = 1;  // header row
    }
    if (rows.size() <= first) throw std::runtime_error("labeled file has no data rows");

    labeled_series out;
    const std::size_t cols = rows[first].size();
    if (cols < 2) throw std::runtime_error("labeled rows need at least x_1 and y columns");
    out.d = cols - 1;
    for (std::size_t r = first; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw std::runtime_error("labeled row has inconsistent column count");
        for (std::size_t j = 0; j + 1 < cols; ++j)
            out.features.push_back(parse_double(rows[r][j], "labeled"));
        std::string y = rows[r][cols - 1];
        while (!y.empty() && std::isspace(static_cast<unsigned char>(y.back()))) y.pop_back();
        const bool last_row = r + 1 == rows.size();
        if (last_row) {
            if (!y.empty())
                throw std::runtime_error("final labeled row must leave y empty (the query point)");
        } else {
            if (y != "0" && y != "1") throw std::runtime_error("labels must be 0 or 1");
            out.labels.push_back(y == "1" ? 1 : 0);
        }
    }
    out.validate();
    return out;
}

// Write-then-rename so readers never observe a partial file.
inline void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("rename failed: " + tmp + " -> " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace recur
