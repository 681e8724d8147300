#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "chirp/classifier.hpp"

namespace chirp {

struct EmbeddingRow {
    std::string id;
    std::string label;
    Eigen::VectorXd vector;  // attention context, length 2H
};

struct EmbeddingSet {
    std::vector<EmbeddingRow> rows;
};

/// Attention context vectors captured from the classifier forward pass.
inline EmbeddingSet extract_embeddings(const BiLstmAttentionModel& model,
                                       const std::vector<TrainingExample>& examples,
                                       const std::vector<std::string>& class_names,
                                       const std::vector<std::string>& ids) {
    if (ids.size() != examples.size())
        throw std::invalid_argument("extract_embeddings: id/example count mismatch");
    EmbeddingSet out;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const ForwardTrace tr = forward_trace(model, examples[i].input);
        out.rows.push_back({ids[i], class_names.at(examples[i].label), tr.attention.context});
    }
    return out;
}

/// Unweighted per-label means, sorted lexicographically by label.
inline std::vector<std::pair<std::string, Eigen::VectorXd>> class_means(
    const EmbeddingSet& embeddings) {
    if (embeddings.rows.empty()) throw std::invalid_argument("class_means: empty embedding set");
    std::map<std::string, std::pair<Eigen::VectorXd, std::size_t>> acc;
    for (const auto& r : embeddings.rows) {
        auto it = acc.find(r.label);
        if (it == acc.end())
            acc.emplace(r.label, std::make_pair(r.vector, std::size_t{1}));
        else {
            it->second.first += r.vector;
            ++it->second.second;
        }
    }
    std::vector<std::pair<std::string, Eigen::VectorXd>> out;
    for (const auto& [label, p] : acc)
        out.emplace_back(label, p.first / static_cast<double>(p.second));
    return out;
}

struct DendrogramNode {
    std::string label;       // leaves only
    int left = -1, right = -1;
    double distance = 0.0;   // merge distance, 0 for leaves
};

struct Dendrogram {
    std::vector<DendrogramNode> nodes;  // leaves first, then merges in order
    int root = -1;
};

/// Bottom-up average-linkage clustering with Euclidean distances. Ties are
/// broken by the lexicographically smallest (label, label) pair, where a
/// cluster is identified by its smallest member label.
inline Dendrogram agglomerative(const std::vector<std::pair<std::string, Eigen::VectorXd>>& points) {
    const std::size_t n = points.size();
    if (n < 2) throw std::invalid_argument("agglomerative: need at least 2 points");

    Dendrogram tree;
    struct Cluster {
        int node;
        std::size_t size;
        std::string rep;  // smallest member label
    };
    std::vector<Cluster> active;
    for (std::size_t i = 0; i < n; ++i) {
        tree.nodes.push_back({points[i].first, -1, -1, 0.0});
        active.push_back({static_cast<int>(i), 1, points[i].first});
    }
    // average pairwise distances, maintained by the Lance-Williams update
    std::vector<std::vector<double>> dist(active.size(), std::vector<double>(active.size(), 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = (points[i].second - points[j].second).norm();

    while (active.size() > 1) {
        std::size_t bi = 0, bj = 1;
        for (std::size_t i = 0; i < active.size(); ++i)
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                const double d = dist[i][j];
                const double best = dist[bi][bj];
                if (d < best) {
                    bi = i;
                    bj = j;
                } else if (d == best && !(bi == i && bj == j)) {
                    auto key = [&](std::size_t a, std::size_t b) {
                        return std::minmax(active[a].rep, active[b].rep);
                    };
                    if (key(i, j) < key(bi, bj)) {
                        bi = i;
                        bj = j;
                    }
                }
            }
        const double d = dist[bi][bj];
        tree.nodes.push_back({"", active[bi].node, active[bj].node, d});
        const int merged_node = static_cast<int>(tree.nodes.size()) - 1;
        const std::size_t merged_size = active[bi].size + active[bj].size;
        const std::string rep = std::min(active[bi].rep, active[bj].rep);

        // Lance-Williams: d(m, k) = (|i| d(i,k) + |j| d(j,k)) / (|i| + |j|)
        std::vector<double> new_row(active.size());
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (k == bi || k == bj) continue;
            new_row[k] = (static_cast<double>(active[bi].size) * dist[bi][k] +
                          static_cast<double>(active[bj].size) * dist[bj][k]) /
                         static_cast<double>(merged_size);
        }
        active[bi] = {merged_node, merged_size, rep};
        for (std::size_t k = 0; k < active.size(); ++k)
            if (k != bi && k != bj) dist[bi][k] = dist[k][bi] = new_row[k];
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
        dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(bj));
        for (auto& row : dist) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    tree.root = active.front().node;
    return tree;
}

namespace detail {

inline std::string full_precision(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

/// CSV with header id,label,e0..e{dim-1}; values round-trip to the same doubles.
inline void export_embeddings(const EmbeddingSet& embeddings,
                              const std::filesystem::path& path) {
    if (embeddings.rows.empty())
        throw std::invalid_argument("export_embeddings: empty embedding set");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("export_embeddings: cannot write " + path.string());
    const Eigen::Index dim = embeddings.rows.front().vector.size();
    f << "id,label";
    for (Eigen::Index i = 0; i < dim; ++i) f << ",e" << i;
    f << "\n";
    for (const auto& r : embeddings.rows) {
        f << r.id << "," << r.label;
        for (Eigen::Index i = 0; i < dim; ++i) f << "," << detail::full_precision(r.vector[i]);
        f << "\n";
    }
    if (!f) throw std::runtime_error("export_embeddings: write failed");
}

inline nlohmann::json dendrogram_to_json(const Dendrogram& tree, int node_index) {
    const DendrogramNode& node = tree.nodes.at(static_cast<std::size_t>(node_index));
    if (node.left < 0) return {{"label", node.label}, {"distance", node.distance}};
    return {{"children", nlohmann::json::array({dendrogram_to_json(tree, node.left),
                                                dendrogram_to_json(tree, node.right)})},
            {"distance", node.distance}};
}

inline nlohmann::json dendrogram_to_json(const Dendrogram& tree) {
    return dendrogram_to_json(tree, tree.root);
}

/// Newick with midpoint branch lengths: a child hangs at (parent - child)/2.
inline std::string dendrogram_to_newick(const Dendrogram& tree, int node_index,
                                        double parent_distance) {
    const DendrogramNode& node = tree.nodes.at(static_cast<std::size_t>(node_index));
    const double branch = (parent_distance - node.distance) / 2.0;
    if (node.left < 0) return node.label + ":" + detail::full_precision(branch);
    return "(" + dendrogram_to_newick(tree, node.left, node.distance) + "," +
           dendrogram_to_newick(tree, node.right, node.distance) + "):" +
           detail::full_precision(branch);
}

inline std::string dendrogram_to_newick(const Dendrogram& tree) {
    const DendrogramNode& root = tree.nodes.at(static_cast<std::size_t>(tree.root));
    if (root.left < 0) return root.label + ";";
    return "(" + dendrogram_to_newick(tree, root.left, root.distance) + "," +
           dendrogram_to_newick(tree, root.right, root.distance) + ");";
}

inline void export_dendrogram(const Dendrogram& tree, const std::filesystem::path& json_path,
                              const std::filesystem::path& newick_path) {
    {
        std::ofstream f(json_path);
        if (!f) throw std::runtime_error("export_dendrogram: cannot write " + json_path.string());
        f << dendrogram_to_json(tree).dump(2) << "\n";
    }
    {
        std::ofstream f(newick_path);
        if (!f)
            throw std::runtime_error("export_dendrogram: cannot write " + newick_path.string());
        f << dendrogram_to_newick(tree) << "\n";
    }
}

}  // namespace chirp
