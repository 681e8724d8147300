#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace chirp {

/// C x C confusion counts, rows = true class, columns = predicted.
struct ConfusionMatrix {
    std::vector<std::vector<std::size_t>> counts;

    explicit ConfusionMatrix(std::size_t classes)
        : counts(classes, std::vector<std::size_t>(classes, 0)) {}
    std::size_t classes() const { return counts.size(); }
    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& row : counts)
            for (std::size_t c : row) n += c;
        return n;
    }
};

struct MetricsReport {
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double accuracy = 0.0;
    std::vector<double> per_class_precision;
    std::vector<double> per_class_recall;
};

inline ConfusionMatrix confusion(const std::vector<std::size_t>& truth,
                                 const std::vector<std::size_t>& predicted,
                                 std::size_t classes) {
    if (truth.size() != predicted.size())
        throw std::invalid_argument("confusion: length mismatch");
    ConfusionMatrix cm(classes);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= classes || predicted[i] >= classes)
            throw std::invalid_argument("confusion: label out of range");
        ++cm.counts[truth[i]][predicted[i]];
    }
    return cm;
}

/// Macro precision averages over all classes (zero-denominator -> 0); macro
/// recall averages only over classes present in the truth labels.
inline MetricsReport metrics(const ConfusionMatrix& cm) {
    const std::size_t c = cm.classes();
    if (c == 0 || cm.total() == 0) throw std::invalid_argument("metrics: empty matrix");
    MetricsReport r;
    std::size_t trace = 0;
    std::size_t recall_classes = 0;
    for (std::size_t k = 0; k < c; ++k) {
        std::size_t col = 0, row = 0;
        for (std::size_t i = 0; i < c; ++i) {
            col += cm.counts[i][k];
            row += cm.counts[k][i];
        }
        const std::size_t tp = cm.counts[k][k];
        trace += tp;
        const double prec = col > 0 ? static_cast<double>(tp) / col : 0.0;
        const double rec = row > 0 ? static_cast<double>(tp) / row : 0.0;
        r.per_class_precision.push_back(prec);
        r.per_class_recall.push_back(rec);
        r.macro_precision += prec;
        if (row > 0) {
            r.macro_recall += rec;
            ++recall_classes;
        }
    }
    r.macro_precision /= static_cast<double>(c);
    if (recall_classes > 0) r.macro_recall /= static_cast<double>(recall_classes);
    r.accuracy = static_cast<double>(trace) / cm.total();
    return r;
}

}  // namespace chirp
