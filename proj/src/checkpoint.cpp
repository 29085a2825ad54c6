#include "genrisk/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace genrisk::ad {

namespace {

constexpr char kMagic[8] = {'G', 'R', 'C', 'K', 'P', 'T', '0', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw Error("checkpoint: truncated file");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw Error("checkpoint: truncated file");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void save_checkpoint_entries(const std::vector<std::pair<std::string, const Mat*>>& entries,
                             const std::string& path, const std::string& metadata) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("checkpoint: cannot open " + path + " for writing");
    out.write(kMagic, 8);
    put_u32(out, static_cast<std::uint32_t>(metadata.size()));
    out.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));
    put_u32(out, static_cast<std::uint32_t>(entries.size()));
    for (const auto& [name, value] : entries) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(out, static_cast<std::uint32_t>(value->rows()));
        put_u32(out, static_cast<std::uint32_t>(value->cols()));
        for (Eigen::Index r = 0; r < value->rows(); ++r)
            for (Eigen::Index c = 0; c < value->cols(); ++c) put_f64(out, (*value)(r, c));
    }
    if (!out) throw Error("checkpoint: write failed for " + path);
}

CheckpointData read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw Error("checkpoint: bad magic in " + path);
    CheckpointData data;
    const std::uint32_t meta_len = get_u32(in);
    data.metadata.resize(meta_len);
    in.read(data.metadata.data(), meta_len);
    const std::uint32_t n = get_u32(in);
    data.entries.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t name_len = get_u32(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const std::uint32_t rows = get_u32(in);
        const std::uint32_t cols = get_u32(in);
        Mat value(rows, cols);
        for (std::uint32_t r = 0; r < rows; ++r)
            for (std::uint32_t c = 0; c < cols; ++c) value(r, c) = get_f64(in);
        data.entries.emplace_back(std::move(name), std::move(value));
    }
    return data;
}

void save_checkpoint(const ParamStore& params, const std::string& path,
                     const std::string& metadata) {
    std::vector<std::pair<std::string, const Mat*>> entries;
    entries.reserve(params.size());
    for (const auto& p : params) entries.emplace_back(p->name, &p->value);
    save_checkpoint_entries(entries, path, metadata);
}

std::string load_checkpoint(ParamStore& params, const std::string& path) {
    CheckpointData data = read_checkpoint(path);
    for (auto& [name, value] : data.entries) {
        if (Parameter* existing = params.find(name)) {
            if (existing->value.rows() != value.rows() || existing->value.cols() != value.cols())
                throw ShapeMismatch("checkpoint: shape mismatch for " + name);
            existing->value = std::move(value);
        } else {
            params.add(name, std::move(value));
        }
    }
    return data.metadata;
}

}  // namespace genrisk::ad
