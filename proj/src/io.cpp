#include "trom/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "trom/errors.hpp"

namespace trom::io {

namespace {

constexpr std::uint32_t kTensorVersion = 1;
constexpr std::uint32_t kFactorsVersion = 1;

// the formats are little-endian by definition; this library targets
// little-endian hosts (checked once at write/read time)
bool host_is_little_endian() {
    const std::uint16_t probe = 1;
    std::uint8_t byte;
    std::memcpy(&byte, &probe, 1);
    return byte == 1;
}

void require_le() {
    if (!host_is_little_endian())
        throw IoError("binary formats require a little-endian host");
}

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError("unexpected end of file");
}

void write_block(std::ofstream& out, const double* data, std::size_t count) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
}

void read_block(std::ifstream& in, double* data, std::size_t count) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 8));
    if (!in) throw IoError("unexpected end of file inside data block");
}

void write_matrix(std::ofstream& out, const Matrix& m) {
    write_pod(out, static_cast<std::uint64_t>(m.rows()));
    write_pod(out, static_cast<std::uint64_t>(m.cols()));
    write_block(out, m.data(), static_cast<std::size_t>(m.size()));
}

Matrix read_matrix(std::ifstream& in) {
    std::uint64_t rows = 0, cols = 0;
    read_pod(in, rows);
    read_pod(in, cols);
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    read_block(in, m.data(), static_cast<std::size_t>(m.size()));
    return m;
}

}  // namespace

void write_tensor(const std::string& path, const Tensor3& x) {
    require_le();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write("TROM", 4);
    write_pod(out, kTensorVersion);
    write_pod(out, static_cast<std::uint64_t>(x.n()));
    write_pod(out, static_cast<std::uint64_t>(x.t()));
    write_pod(out, static_cast<std::uint64_t>(x.p()));
    write_block(out, x.data().data(), x.data().size());
    if (!out) throw IoError("short write to " + path);
}

Tensor3 read_tensor(const std::string& path) {
    require_le();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "TROM", 4) != 0)
        throw IoError(path + " is not a snapshot tensor file (bad magic)");
    std::uint32_t version = 0;
    read_pod(in, version);
    if (version != kTensorVersion)
        throw IoError("unsupported tensor format version " + std::to_string(version));
    std::uint64_t n = 0, t = 0, p = 0;
    read_pod(in, n);
    read_pod(in, t);
    read_pod(in, p);
    std::vector<double> data(static_cast<std::size_t>(n * t * p));
    read_block(in, data.data(), data.size());
    return Tensor3(static_cast<Index>(n), static_cast<Index>(t), static_cast<Index>(p),
                   std::move(data));
}

void write_factors(const std::string& path, const TuckerFactors& f) {
    require_le();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write("TROMF", 5);
    write_pod(out, kFactorsVersion);
    write_pod(out, static_cast<std::uint8_t>(f.weighted() ? 1 : 0));
    const auto ranks = f.ranks();
    for (Index r : ranks) write_pod(out, static_cast<std::uint64_t>(r));
    write_block(out, f.core.data().data(), f.core.data().size());
    write_matrix(out, f.w);
    write_matrix(out, f.t);
    write_matrix(out, f.s);
    write_pod(out, f.delta);
    write_pod(out, f.epsilon);
    if (!out) throw IoError("short write to " + path);
}

TuckerFactors read_factors(const std::string& path,
                           std::shared_ptr<const SpdOperator> weighting) {
    require_le();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, "TROMF", 5) != 0)
        throw IoError(path + " is not a factorization file (bad magic)");
    std::uint32_t version = 0;
    read_pod(in, version);
    if (version != kFactorsVersion)
        throw IoError("unsupported factorization format version " + std::to_string(version));
    std::uint8_t weighted = 0;
    read_pod(in, weighted);
    std::uint64_t ranks[3];
    for (auto& r : ranks) read_pod(in, r);

    TuckerFactors f;
    std::vector<double> core(static_cast<std::size_t>(ranks[0] * ranks[1] * ranks[2]));
    read_block(in, core.data(), core.size());
    f.core = Tensor3(static_cast<Index>(ranks[0]), static_cast<Index>(ranks[1]),
                     static_cast<Index>(ranks[2]), std::move(core));
    f.w = read_matrix(in);
    f.t = read_matrix(in);
    f.s = read_matrix(in);
    read_pod(in, f.delta);
    read_pod(in, f.epsilon);

    if (weighted && !weighting)
        throw IoError(path + " stores a weighted factorization; a weight operator is required");
    if (!weighted && weighting)
        throw IoError(path + " stores an unweighted factorization; no weight expected");
    f.weighting = std::move(weighting);
    return f;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    char buf[64];
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out << buf << (i + 1 < row.size() ? "," : "\n");
        }
    }
    if (!out) throw IoError("short write to " + path);
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for hashing");
    std::uint64_t hash = 1469598103934665603ull;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
    }
    return hash;
}

}  // namespace trom::io
