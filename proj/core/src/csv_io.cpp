#include "budgetal/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace budgetal::datagen {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

[[noreturn]] void fail(const std::string& path, std::size_t line_no,
                       const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_real(const std::string& cell, const std::string& path,
                  std::size_t line_no) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        fail(path, line_no, "malformed numeric cell '" + cell + "'");
    return v;
}

long parse_int(const std::string& cell, const std::string& path,
               std::size_t line_no) {
    long v = 0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        fail(path, line_no, "malformed label cell '" + cell + "'");
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ":1: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_line(line);
    std::size_t label_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == "label") {
            label_col = i;
            break;
        }
    if (label_col == header.size())
        throw std::runtime_error(path + ":1: no column named 'label'");
    if (header.size() < 2)
        throw std::runtime_error(path + ":1: need at least one feature column");

    const std::size_t d = header.size() - 1;
    std::vector<double> features;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            fail(path, line_no, "expected " + std::to_string(header.size()) +
                                    " cells, found " + std::to_string(cells.size()));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i == label_col) {
                const long y = parse_int(cells[i], path, line_no);
                if (y < 0) fail(path, line_no, "negative label");
                labels.push_back(static_cast<int>(y));
            } else {
                features.push_back(parse_real(cells[i], path, line_no));
            }
        }
    }
    if (labels.empty()) throw std::runtime_error(path + ": no data rows");

    std::set<int> distinct(labels.begin(), labels.end());
    const int max_label = *distinct.rbegin();
    if (*distinct.begin() != 0 ||
        distinct.size() != static_cast<std::size_t>(max_label) + 1) {
        std::string seen;
        for (int y : distinct) seen += (seen.empty() ? "" : ",") + std::to_string(y);
        throw std::runtime_error(path + ": class indices {" + seen +
                                 "} are not the contiguous range 0..C-1");
    }
    const std::size_t n = labels.size();
    const std::size_t num_classes = distinct.size();
    return Dataset(n, d, num_classes, std::move(features), std::move(labels));
}

void save_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    for (std::size_t j = 0; j < dataset.dim(); ++j) out << "f" << j << ",";
    out << "label\n";
    char buf[40];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto row = dataset.row(i);
        for (double v : row) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ",";
        }
        out << dataset.label(i) << "\n";
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace budgetal::datagen
