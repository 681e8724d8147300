#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace chirp {

// Binary container: magic, little-endian u64 header length, JSON header,
// then the tensors as little-endian f64 in header order (row-major).
namespace container {

inline constexpr char kMagic[8] = {'C', 'H', 'I', 'R', 'P', 'B', '1', '\n'};

static_assert(std::endian::native == std::endian::little,
              "container assumes a little-endian host");

struct Archive {
    nlohmann::json meta;
    std::vector<std::pair<std::string, Eigen::MatrixXd>> tensors;

    void add(const std::string& name, const Eigen::MatrixXd& m) { tensors.emplace_back(name, m); }
    void add(const std::string& name, const Eigen::VectorXd& v) {
        tensors.emplace_back(name, Eigen::MatrixXd(v));
    }
    const Eigen::MatrixXd& get(const std::string& name) const {
        for (const auto& [n, m] : tensors)
            if (n == name) return m;
        throw std::runtime_error("container: missing tensor " + name);
    }
    Eigen::VectorXd get_vector(const std::string& name) const {
        const Eigen::MatrixXd& m = get(name);
        if (m.cols() != 1) throw std::runtime_error("container: tensor " + name + " is not a vector");
        return m.col(0);
    }
};

inline void save(const Archive& a, const std::filesystem::path& path) {
    nlohmann::json header;
    header["meta"] = a.meta;
    header["tensors"] = nlohmann::json::array();
    for (const auto& [name, m] : a.tensors)
        header["tensors"].push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    const std::string hs = header.dump();

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("container: cannot write " + path.string());
    f.write(kMagic, sizeof(kMagic));
    const std::uint64_t hlen = hs.size();
    f.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (const auto& [name, m] : a.tensors) {
        // row-major on disk
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
        f.write(reinterpret_cast<const char*>(rm.data()),
                static_cast<std::streamsize>(sizeof(double) * rm.size()));
    }
    if (!f) throw std::runtime_error("container: write failed for " + path.string());
}

inline Archive load(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("container: cannot open " + path.string());
    char magic[sizeof(kMagic)];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("container: bad magic in " + path.string());
    std::uint64_t hlen = 0;
    f.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    std::string hs(hlen, '\0');
    f.read(hs.data(), static_cast<std::streamsize>(hlen));
    if (!f) throw std::runtime_error("container: truncated header in " + path.string());
    nlohmann::json header = nlohmann::json::parse(hs);

    Archive a;
    a.meta = header.value("meta", nlohmann::json::object());
    for (const auto& t : header.at("tensors")) {
        const Eigen::Index rows = t.at("rows").get<Eigen::Index>();
        const Eigen::Index cols = t.at("cols").get<Eigen::Index>();
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
        f.read(reinterpret_cast<char*>(rm.data()),
               static_cast<std::streamsize>(sizeof(double) * rm.size()));
        if (!f) throw std::runtime_error("container: truncated tensor data in " + path.string());
        a.tensors.emplace_back(t.at("name").get<std::string>(), Eigen::MatrixXd(rm));
    }
    return a;
}

}  // namespace container

/// FNV-1a 64-bit hash, used for content-addressed idempotence checks.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 14695981039346656037ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

inline std::uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("hash_file: cannot open " + path.string());
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (f.read(buf, sizeof(buf)) || f.gcount() > 0)
        h = fnv1a(buf, static_cast<std::size_t>(f.gcount()), h);
    return h;
}

}  // namespace chirp
