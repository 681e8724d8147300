#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "chirp/mfcc.hpp"

namespace chirp {

enum class PadSide { Left, Right };
enum class RecombineAxis { X, Y };

struct RearrangeConfig {
    std::size_t slice_len = 150;  // frames per slice (N')
    PadSide pad_side = PadSide::Right;
    double pad_value = 0.0;
    RecombineAxis recombine_axis = RecombineAxis::Y;
    std::size_t max_dim = 2100;

    void validate() const {
        if (slice_len < 1) throw std::invalid_argument("RearrangeConfig: slice_len < 1");
        if (max_dim < 1) throw std::invalid_argument("RearrangeConfig: max_dim < 1");
    }
};

inline void to_json(nlohmann::json& j, const RearrangeConfig& c) {
    j = {{"slice_len", c.slice_len},
         {"pad_side", c.pad_side == PadSide::Left ? "left" : "right"},
         {"pad_value", c.pad_value},
         {"recombine_axis", c.recombine_axis == RecombineAxis::X ? "x" : "y"},
         {"max_dim", c.max_dim}};
}
inline void from_json(const nlohmann::json& j, RearrangeConfig& c) {
    c.slice_len = j.value("slice_len", c.slice_len);
    if (j.contains("pad_side")) {
        const std::string s = j["pad_side"].get<std::string>();
        if (s != "left" && s != "right")
            throw std::invalid_argument("RearrangeConfig: pad_side must be left or right");
        c.pad_side = s == "left" ? PadSide::Left : PadSide::Right;
    }
    c.pad_value = j.value("pad_value", c.pad_value);
    if (j.contains("recombine_axis")) {
        const std::string s = j["recombine_axis"].get<std::string>();
        if (s != "x" && s != "y")
            throw std::invalid_argument("RearrangeConfig: recombine_axis must be x or y");
        c.recombine_axis = s == "x" ? RecombineAxis::X : RecombineAxis::Y;
    }
    c.max_dim = j.value("max_dim", c.max_dim);
}

/// m x (D*N') matrix, one flattened padded slice per row.
struct RearrangedMatrix {
    Eigen::MatrixXd values;
    std::size_t slice_count = 0;
    std::size_t source_d = 0;
    std::size_t source_n = 0;
};

struct CappedVector {
    std::vector<double> values;
    std::size_t original_len = 0;
};

/// Partition the columns of M into time-ordered slices of at most N' columns.
inline std::vector<Eigen::MatrixXd> slice_matrix(const FeatureMatrix& m,
                                                 std::size_t slice_len) {
    if (slice_len < 1) throw std::invalid_argument("slice_matrix: slice_len < 1");
    std::vector<Eigen::MatrixXd> slices;
    const Eigen::Index n = m.values.cols();
    for (Eigen::Index start = 0; start < n; start += static_cast<Eigen::Index>(slice_len)) {
        const Eigen::Index w = std::min<Eigen::Index>(static_cast<Eigen::Index>(slice_len),
                                                      n - start);
        slices.push_back(m.values.middleCols(start, w));
    }
    return slices;
}

inline Eigen::MatrixXd pad_slice(const Eigen::MatrixXd& s, std::size_t slice_len,
                                 PadSide side, double value) {
    if (static_cast<std::size_t>(s.cols()) > slice_len)
        throw std::invalid_argument("pad_slice: slice wider than target");
    if (static_cast<std::size_t>(s.cols()) == slice_len) return s;
    Eigen::MatrixXd out =
        Eigen::MatrixXd::Constant(s.rows(), static_cast<Eigen::Index>(slice_len), value);
    if (side == PadSide::Right)
        out.leftCols(s.cols()) = s;
    else
        out.rightCols(s.cols()) = s;
    return out;
}

/// Time-major flattening: element (d, t) of the padded slice maps to index t*D + d.
inline Eigen::RowVectorXd flatten_slice(const Eigen::MatrixXd& ps) {
    Eigen::RowVectorXd out(ps.size());
    const Eigen::Index d = ps.rows();
    for (Eigen::Index t = 0; t < ps.cols(); ++t)
        out.segment(t * d, d) = ps.col(t).transpose();
    return out;
}

inline RearrangedMatrix recombine(const std::vector<Eigen::RowVectorXd>& flattened,
                                  RecombineAxis axis) {
    if (flattened.empty()) throw std::invalid_argument("recombine: no slices");
    const Eigen::Index len = flattened.front().size();
    for (const auto& f : flattened)
        if (f.size() != len) throw std::invalid_argument("recombine: mixed slice lengths");
    RearrangedMatrix out;
    out.slice_count = flattened.size();
    if (axis == RecombineAxis::Y) {
        out.values.resize(static_cast<Eigen::Index>(flattened.size()), len);
        for (std::size_t i = 0; i < flattened.size(); ++i)
            out.values.row(static_cast<Eigen::Index>(i)) = flattened[i];
    } else {
        out.values.resize(1, static_cast<Eigen::Index>(flattened.size()) * len);
        for (std::size_t i = 0; i < flattened.size(); ++i)
            out.values.block(0, static_cast<Eigen::Index>(i) * len, 1, len) = flattened[i];
    }
    return out;
}

/// Row-major flatten of M', then truncate or pad to exactly max_dim elements.
inline CappedVector cap_vector(const RearrangedMatrix& m, std::size_t max_dim,
                               double pad_value = 0.0) {
    if (max_dim < 1) throw std::invalid_argument("cap_vector: max_dim < 1");
    CappedVector out;
    out.original_len = static_cast<std::size_t>(m.values.size());
    out.values.assign(max_dim, pad_value);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < m.values.rows() && k < max_dim; ++r)
        for (Eigen::Index c = 0; c < m.values.cols() && k < max_dim; ++c)
            out.values[k++] = m.values(r, c);
    return out;
}

/// Slice -> pad -> flatten -> recombine -> cap, composed in order.
inline CappedVector rearrange_pipeline(const FeatureMatrix& m, const RearrangeConfig& config) {
    config.validate();
    const auto slices = slice_matrix(m, config.slice_len);
    std::vector<Eigen::RowVectorXd> flattened;
    flattened.reserve(slices.size());
    for (const auto& s : slices)
        flattened.push_back(
            flatten_slice(pad_slice(s, config.slice_len, config.pad_side, config.pad_value)));
    RearrangedMatrix rm = recombine(flattened, config.recombine_axis);
    rm.source_d = m.rows();
    rm.source_n = m.cols();
    return cap_vector(rm, config.max_dim, config.pad_value);
}

}  // namespace chirp
