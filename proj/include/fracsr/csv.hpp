#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fracsr/errors.hpp"

namespace fracsr::csv {

// Round-trip exact, locale-independent number formatting; keeps CSV bytes reproducible.
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw ParameterError("cannot open '" + path + "' for writing");
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

}  // namespace fracsr::csv
