#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lrq {

/// Locale-independent number formatting ('.' decimal separator, shortest round-trip form).
std::string format_double(double v);

/// Minimal CSV writer. Cells are never quoted; callers keep commas out of text fields.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(unsigned long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(std::size_t v) { return cell(static_cast<unsigned long long>(v)); }
    /// Empty cell when absent.
    template <typename T>
    CsvWriter& cell(const std::optional<T>& v) {
        return v ? cell(*v) : cell(std::string_view{});
    }
    void end_row();

    std::size_t columns() const noexcept { return columns_; }

private:
    void separator();

    std::ofstream out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

/// Splits one CSV line on commas (no quoting support).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace lrq
