// csv.hpp: number formatting and small CSV writers shared by the modules.

#pragma once

#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace ddspin {

// Shortest round-trip decimal representation.
std::string format_number(double value);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string> header);

    CsvWriter& cell(double value);
    CsvWriter& cell(long long value);
    CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
    CsvWriter& cell(const std::string& value);
    void end_row();

private:
    void separator();

    std::ostream& out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

}  // namespace ddspin
