#include "ltml/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ltml::csv {

std::string format_double(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        double back;
        std::sscanf(buf, "%lf", &back);
        if (back == x) break;
    }
    return buf;
}

static std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

static void write_header(std::ofstream& out, const std::vector<std::string>& header) {
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out << ',';
        out << header[c];
    }
    out << '\n';
}

void write_matrix(const std::filesystem::path& path, const Matrix& m,
                  const std::vector<std::string>& header) {
    auto out = open_out(path);
    write_header(out, header);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

void write_labels(const std::filesystem::path& path, const LabelMatrix& m,
                  const std::vector<std::string>& header) {
    auto out = open_out(path);
    write_header(out, header);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << static_cast<int>(m(r, c));
        }
        out << '\n';
    }
}

static std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path,
                                                       std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    std::vector<std::vector<std::string>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            if (header) *header = cells;
            first = false;
        } else {
            rows.push_back(std::move(cells));
        }
    }
    return rows;
}

Matrix read_matrix(const std::filesystem::path& path, std::vector<std::string>* header) {
    std::vector<std::string> hdr;
    auto rows = read_rows(path, &hdr);
    if (header) *header = hdr;
    Matrix m(rows.size(), hdr.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != hdr.size())
            throw std::runtime_error("ragged CSV row in " + path.string());
        for (std::size_t c = 0; c < hdr.size(); ++c) m(r, c) = std::stod(rows[r][c]);
    }
    return m;
}

LabelMatrix read_labels(const std::filesystem::path& path, std::vector<std::string>* header) {
    std::vector<std::string> hdr;
    auto rows = read_rows(path, &hdr);
    if (header) *header = hdr;
    LabelMatrix m(rows.size(), hdr.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != hdr.size())
            throw std::runtime_error("ragged CSV row in " + path.string());
        for (std::size_t c = 0; c < hdr.size(); ++c) {
            int v = std::stoi(rows[r][c]);
            if (v != 0 && v != 1)
                throw std::runtime_error("non-binary label in " + path.string());
            m(r, c) = static_cast<std::uint8_t>(v);
        }
    }
    return m;
}

std::vector<std::string> default_header(const std::string& prefix, std::size_t n) {
    std::vector<std::string> h;
    h.reserve(n);
    for (std::size_t i = 0; i < n; ++i) h.push_back(prefix + std::to_string(i));
    return h;
}

}  // namespace ltml::csv
