#include "ddspin/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ddspin {

std::string format_number(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    if (value == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string> header)
    : out_(out), columns_(header.size()) {
    bool first = true;
    for (const auto& h : header) {
        if (!first) out_ << ',';
        out_ << h;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::separator() {
    if (filled_ == columns_) throw std::logic_error("CsvWriter: too many cells in row");
    if (filled_ > 0) out_ << ',';
    ++filled_;
}

CsvWriter& CsvWriter::cell(double value) {
    separator();
    out_ << format_number(value);
    return *this;
}

CsvWriter& CsvWriter::cell(long long value) {
    separator();
    out_ << value;
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& value) {
    separator();
    out_ << value;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) throw std::logic_error("CsvWriter: incomplete row");
    out_ << '\n';
    filled_ = 0;
}

}  // namespace ddspin
