//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "msdi/errors.hpp"

// Minimal CSV support for the fixed-format files this project exchanges:
// UTF-8, comma separated, '.' decimals, '\n' line endings, no quoting.
// Lines starting with '#' are comments and are skipped on read.

namespace msdi::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by header name, -1 if absent.
    int column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

inline Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open '" + path + "' for reading");
    Table table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            table.header = split_line(line);
            header_seen = true;
        } else {
            table.rows.push_back(split_line(line));
        }
    }
    if (!header_seen) throw_io("'" + path + "' has no header row");
    return table;
}

inline double parse_double(const std::string& text, const std::string& what) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto r = std::from_chars(first, last, value);
    if (r.ec != std::errc{} || r.ptr != last)
        throw_validation("cannot parse " + what + " from '" + text + "'");
    return value;
}

// Shortest round-trip representation; deterministic across runs and platforms.
inline std::string format_double(double value) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, r.ptr);
}

class Writer {
public:
    void comment(const std::string& text) { out_ << "# " << text << '\n'; }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw_io("cannot open '" + path + "' for writing");
        out << out_.str();
        if (!out) throw_io("write to '" + path + "' failed");
    }

private:
    std::ostringstream out_;
};

}  // namespace msdi::csv
