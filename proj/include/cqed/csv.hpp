#pragma once

#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cqed {

/// Shortest text with 17 significant digits; "inf", "-inf", "nan" for
/// non-finite values.
std::string format_double(double v);

/// Quotes a field if it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

/// Writes '#'-prefixed metadata lines, a fixed header row, then data rows.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& metadata,
              std::string_view header);

    void row(std::span<const double> values);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::ofstream out_;
    std::string path_;
};

} // namespace cqed
