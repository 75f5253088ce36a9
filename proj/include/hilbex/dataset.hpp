#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hilbex {

// A fixed-dimension collection of dense vectors in one flat buffer. Point
// identity throughout the library is the row index into this buffer.
struct Dataset {
    std::size_t dim = 0;
    std::vector<double> values; // row-major, n() * dim entries
    std::string label;          // space label such as "euc_10"; may be empty
    std::uint64_t seed = 0;     // generator seed when synthetic

    std::size_t n() const { return dim == 0 ? 0 : values.size() / dim; }
    const double* row(std::size_t i) const { return values.data() + i * dim; }
    double* row(std::size_t i) { return values.data() + i * dim; }
};

// n vectors with i.i.d. components uniform on [0,1), deterministic in seed
// (mt19937_64 stream, 53-bit mantissa mapping; see Rng).
Dataset gen_uniform(std::size_t n, std::size_t dim, std::uint64_t seed);

// Normalizes every row with normalize_to_simplex. Throws if any row has a
// negative component or sums to zero.
Dataset to_simplex(Dataset d);

enum class FileFormat { Text, Binary };

// Text: one vector per line, whitespace-separated decimals written with 9
// significant digits, preceded by a "# dim=<d> count=<n>" comment.
// Binary: magic "HLBX1", little-endian u32 dim, u64 count, then count*dim
// little-endian IEEE-754 32-bit floats.
void save_vectors(const Dataset& d, const std::string& path, FileFormat format);

// Reads either format back (sniffed via the magic bytes). Ragged rows,
// non-numeric tokens and empty files raise std::runtime_error with the
// offending line number.
Dataset load_vectors(const std::string& path);

// Format implied by the file extension: ".bin" means binary, anything else
// text. Used by the CLI.
FileFormat format_for_path(const std::string& path);

} // namespace hilbex
