#include "hilbex/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "hilbex/metrics.hpp"
#include "hilbex/random.hpp"

namespace hilbex {

namespace {

constexpr char kMagic[5] = {'H', 'L', 'B', 'X', '1'};

void put_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}

std::uint64_t get_u64le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

Dataset load_binary(const std::string& path, std::ifstream& in) {
    in.seekg(0);
    char magic[5];
    in.read(magic, 5);
    unsigned char header[12];
    in.read(reinterpret_cast<char*>(header), 12);
    if (!in) throw std::runtime_error(path + ": truncated binary header");
    Dataset d;
    d.dim = get_u32le(header);
    const std::uint64_t count = get_u64le(header + 4);
    if (d.dim == 0) throw std::runtime_error(path + ": binary header declares dim 0");
    std::vector<float> raw(d.dim * count);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(float)));
    if (!in) throw std::runtime_error(path + ": truncated binary payload");
    static_assert(std::endian::native == std::endian::little,
                  "binary loader assumes a little-endian host");
    d.values.assign(raw.begin(), raw.end());
    return d;
}

Dataset load_text(const std::string& path, std::ifstream& in) {
    in.seekg(0);
    Dataset d;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;

        std::vector<double> row;
        const char* p = line.c_str();
        const char* end = p + line.size();
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
            if (p >= end) break;
            char* after = nullptr;
            const double v = std::strtod(p, &after);
            if (after == p) parse_fail(path, line_no, "non-numeric token");
            if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite value");
            row.push_back(v);
            p = after;
        }
        if (row.empty()) parse_fail(path, line_no, "empty row");
        if (d.dim == 0) {
            d.dim = row.size();
        } else if (row.size() != d.dim) {
            parse_fail(path, line_no,
                       "ragged row: expected " + std::to_string(d.dim) + " values, got " +
                           std::to_string(row.size()));
        }
        d.values.insert(d.values.end(), row.begin(), row.end());
    }
    if (d.values.empty()) throw std::runtime_error(path + ": no vectors found");
    return d;
}

} // namespace

Dataset gen_uniform(std::size_t n, std::size_t dim, std::uint64_t seed) {
    if (n == 0 || dim == 0)
        throw std::invalid_argument("gen_uniform: n and dim must be positive");
    Dataset d;
    d.dim = dim;
    d.seed = seed;
    d.values.resize(n * dim);
    Rng rng(seed);
    for (double& v : d.values) v = rng.uniform01();
    return d;
}

Dataset to_simplex(Dataset d) {
    const std::size_t n = d.n();
    for (std::size_t i = 0; i < n; ++i) {
        double* row = d.row(i);
        double sum = 0;
        for (std::size_t k = 0; k < d.dim; ++k) {
            if (row[k] < 0)
                throw std::invalid_argument("to_simplex: negative component in row " +
                                            std::to_string(i));
            sum += row[k];
        }
        if (sum <= 0)
            throw std::invalid_argument("to_simplex: all-zero row " + std::to_string(i));
        for (std::size_t k = 0; k < d.dim; ++k) row[k] /= sum;
    }
    return d;
}

void save_vectors(const Dataset& d, const std::string& path, FileFormat format) {
    if (d.n() == 0) throw std::invalid_argument("save_vectors: empty dataset");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");

    if (format == FileFormat::Binary) {
        std::string header;
        header.append(kMagic, sizeof kMagic);
        put_u32le(header, static_cast<std::uint32_t>(d.dim));
        put_u64le(header, d.n());
        out.write(header.data(), static_cast<std::streamsize>(header.size()));
        static_assert(std::endian::native == std::endian::little,
                      "binary writer assumes a little-endian host");
        std::vector<float> raw(d.values.begin(), d.values.end());
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size() * sizeof(float)));
    } else {
        char buf[40];
        std::string text;
        text.reserve(d.values.size() * 12);
        std::snprintf(buf, sizeof buf, "# dim=%zu count=%zu\n", d.dim, d.n());
        text += buf;
        for (std::size_t i = 0; i < d.n(); ++i) {
            const double* row = d.row(i);
            for (std::size_t k = 0; k < d.dim; ++k) {
                std::snprintf(buf, sizeof buf, "%.9g", row[k]);
                if (k) text.push_back(' ');
                text += buf;
            }
            text.push_back('\n');
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

Dataset load_vectors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    char magic[5] = {};
    in.read(magic, 5);
    if (in.gcount() == 0) throw std::runtime_error(path + ": empty file");
    if (in.gcount() == 5 && std::memcmp(magic, kMagic, 5) == 0) {
        return load_binary(path, in);
    }
    in.clear();
    return load_text(path, in);
}

FileFormat format_for_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos && path.substr(dot) == ".bin") return FileFormat::Binary;
    return FileFormat::Text;
}

} // namespace hilbex
