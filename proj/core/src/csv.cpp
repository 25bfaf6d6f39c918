#include "lrq/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace lrq {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return {buf, end};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : out_(path, std::ios::trunc), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (auto h : header) cell(h);
    end_row();
}

void CsvWriter::separator() {
    if (in_row_ > 0) out_ << ',';
    ++in_row_;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    separator();
    out_ << text;
    return *this;
}

CsvWriter& CsvWriter::cell(double v) {
    separator();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
    separator();
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out_.write(buf, end - buf);
    return *this;
}

CsvWriter& CsvWriter::cell(unsigned long long v) {
    separator();
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out_.write(buf, end - buf);
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_) {
        throw std::logic_error("CsvWriter: row has " + std::to_string(in_row_) + " cells, header has " +
                               std::to_string(columns_));
    }
    out_ << '\n';
    in_row_ = 0;
    if (!out_) throw std::runtime_error("CsvWriter: write failed");
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace lrq
