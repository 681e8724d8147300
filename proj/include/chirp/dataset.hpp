#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace chirp {

struct ManifestEntry {
    std::string path;
    std::string label;
    bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::map<std::string, std::size_t> class_counts;
    std::size_t skipped_non_audio = 0;
};

struct SplitAssignment {
    std::vector<ManifestEntry> train, val, test;
    std::uint64_t seed = 0;
    std::array<double, 3> ratios{0.7, 0.2, 0.1};
};

inline bool is_wav_file(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".wav";
}

/// Scan a directory with one subdirectory per label; entries are ordered
/// lexicographically by (label, path). Non-audio files are counted and skipped.
inline DatasetManifest build_manifest(const std::filesystem::path& root) {
    if (!std::filesystem::is_directory(root))
        throw std::runtime_error("build_manifest: not a directory: " + root.string());
    DatasetManifest m;
    std::vector<std::filesystem::path> labels;
    for (const auto& e : std::filesystem::directory_iterator(root))
        if (e.is_directory()) labels.push_back(e.path());
    std::sort(labels.begin(), labels.end());
    if (labels.empty())
        throw std::runtime_error("build_manifest: no labeled subdirectories in " +
                                 root.string());
    for (const auto& dir : labels) {
        const std::string label = dir.filename().string();
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
            if (!e.is_regular_file()) continue;
            if (is_wav_file(e.path()))
                files.push_back(e.path());
            else
                ++m.skipped_non_audio;
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) m.entries.push_back({f.string(), label});
        if (!files.empty()) m.class_counts[label] = files.size();
    }
    return m;
}

/// Drop every class with fewer than `threshold` samples.
inline DatasetManifest filter_min_samples(const DatasetManifest& manifest,
                                          std::size_t threshold = 4) {
    if (threshold < 1) throw std::invalid_argument("filter_min_samples: threshold < 1");
    DatasetManifest out;
    out.skipped_non_audio = manifest.skipped_non_audio;
    for (const auto& [label, count] : manifest.class_counts)
        if (count >= threshold) out.class_counts[label] = count;
    for (const auto& e : manifest.entries)
        if (out.class_counts.contains(e.label)) out.entries.push_back(e);
    if (out.entries.empty())
        throw std::runtime_error("filter_min_samples: empty after filtering");
    return out;
}

inline std::string normalize_label(const std::string& raw) {
    std::string out;
    bool pending_sep = false;
    for (unsigned char c : raw) {
        if (std::isspace(c) || c == '_') {
            if (!out.empty()) pending_sep = true;
        } else {
            if (pending_sep) {
                out.push_back('_');
                pending_sep = false;
            }
            out.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    return out;
}

/// Lowercase labels, trim, collapse whitespace to underscores; merge collisions.
inline DatasetManifest normalize_labels(const DatasetManifest& manifest) {
    DatasetManifest out;
    out.skipped_non_audio = manifest.skipped_non_audio;
    for (const auto& e : manifest.entries) {
        const std::string norm = normalize_label(e.label);
        out.entries.push_back({e.path, norm});
        ++out.class_counts[norm];
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) {
                  return std::tie(a.label, a.path) < std::tie(b.label, b.path);
              });
    return out;
}

/// Stratified split: within each class, entries are shuffled with a seeded
/// generator; val = floor(r_val*n), test = floor(r_test*n), remainder to train.
inline SplitAssignment split_dataset(const DatasetManifest& manifest,
                                     std::array<double, 3> ratios, std::uint64_t seed) {
    if (ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0 ||
        std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9)
        throw std::invalid_argument("split_dataset: ratios must be non-negative and sum to 1");
    if (manifest.entries.empty()) throw std::invalid_argument("split_dataset: empty manifest");

    SplitAssignment split;
    split.seed = seed;
    split.ratios = ratios;
    std::map<std::string, std::vector<ManifestEntry>> by_class;
    for (const auto& e : manifest.entries) by_class[e.label].push_back(e);

    std::mt19937_64 rng(seed);
    for (auto& [label, items] : by_class) {
        std::shuffle(items.begin(), items.end(), rng);
        const std::size_t n = items.size();
        const std::size_t n_val = static_cast<std::size_t>(ratios[1] * static_cast<double>(n));
        const std::size_t n_test = static_cast<std::size_t>(ratios[2] * static_cast<double>(n));
        if (n_val + n_test >= n && ratios[0] > 0)
            throw std::runtime_error("split_dataset: class '" + label +
                                     "' too small to give train >= 1");
        std::size_t i = 0;
        for (; i < n_val; ++i) split.val.push_back(items[i]);
        for (; i < n_val + n_test; ++i) split.test.push_back(items[i]);
        for (; i < n; ++i) split.train.push_back(items[i]);
    }
    return split;
}

inline SplitAssignment split_dataset(const DatasetManifest& manifest, std::uint64_t seed) {
    return split_dataset(manifest, {0.7, 0.2, 0.1}, seed);
}

// JSON persistence

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
    nlohmann::json j;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : m.entries)
        j["entries"].push_back({{"path", e.path}, {"label", e.label}});
    j["class_counts"] = m.class_counts;
    return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
    DatasetManifest m;
    for (const auto& e : j.at("entries"))
        m.entries.push_back({e.at("path").get<std::string>(), e.at("label").get<std::string>()});
    for (const auto& [k, v] : j.at("class_counts").items())
        m.class_counts[k] = v.get<std::size_t>();
    return m;
}

inline nlohmann::json split_to_json(const SplitAssignment& s) {
    auto part = [](const std::vector<ManifestEntry>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& e : v) a.push_back({{"path", e.path}, {"label", e.label}});
        return a;
    };
    return {{"seed", s.seed},
            {"ratios", s.ratios},
            {"train", part(s.train)},
            {"val", part(s.val)},
            {"test", part(s.test)}};
}

inline SplitAssignment split_from_json(const nlohmann::json& j) {
    SplitAssignment s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.ratios = j.at("ratios").get<std::array<double, 3>>();
    auto part = [&](const char* key, std::vector<ManifestEntry>& out) {
        for (const auto& e : j.at(key))
            out.push_back({e.at("path").get<std::string>(), e.at("label").get<std::string>()});
    };
    part("train", s.train);
    part("val", s.val);
    part("test", s.test);
    return s;
}

}  // namespace chirp
