#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace chirp::nn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double sigmoid(double x) {
    // branch-stable: never exponentiates a large positive argument
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline VectorXd sigmoid(const VectorXd& v) { return v.unaryExpr([](double x) { return sigmoid(x); }); }

/// Uniform init scaled by sqrt(6/(fan_in+fan_out)); biases are zeroed elsewhere.
inline MatrixXd glorot_uniform(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-s, s);
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

struct DenseParams {
    MatrixXd weight;  // out x in
    VectorXd bias;    // out

    static DenseParams init(Eigen::Index out, Eigen::Index in, std::mt19937_64& rng) {
        return {glorot_uniform(out, in, rng), VectorXd::Zero(out)};
    }
    VectorXd forward(const VectorXd& x) const { return weight * x + bias; }
};

// One weight triple per gate: input (H x F), recurrent (H x H), bias (H).
struct LstmCellParams {
    MatrixXd wi, wf, wo, wg;
    MatrixXd ui, uf, uo, ug;
    VectorXd bi, bf, bo, bg;

    Eigen::Index hidden() const { return wi.rows(); }
    Eigen::Index features() const { return wi.cols(); }

    static LstmCellParams init(Eigen::Index hidden, Eigen::Index features,
                               std::mt19937_64& rng) {
        LstmCellParams p;
        for (MatrixXd* w : {&p.wi, &p.wf, &p.wo, &p.wg})
            *w = glorot_uniform(hidden, features, rng);
        for (MatrixXd* u : {&p.ui, &p.uf, &p.uo, &p.ug})
            *u = glorot_uniform(hidden, hidden, rng);
        for (VectorXd* b : {&p.bi, &p.bf, &p.bo, &p.bg}) *b = VectorXd::Zero(hidden);
        return p;
    }
    static LstmCellParams zeros_like(const LstmCellParams& o) {
        LstmCellParams p;
        p.wi = MatrixXd::Zero(o.wi.rows(), o.wi.cols());
        p.wf = p.wi; p.wo = p.wi; p.wg = p.wi;
        p.ui = MatrixXd::Zero(o.ui.rows(), o.ui.cols());
        p.uf = p.ui; p.uo = p.ui; p.ug = p.ui;
        p.bi = VectorXd::Zero(o.bi.size());
        p.bf = p.bi; p.bo = p.bi; p.bg = p.bi;
        return p;
    }
};

struct LstmStepResult {
    VectorXd h, c;
};

/// Single LSTM step: i,f,o = sigmoid gates, g = tanh candidate,
/// c_t = f.c_prev + i.g, h_t = o.tanh(c_t).
inline LstmStepResult lstm_step(const LstmCellParams& p, const VectorXd& x,
                                const VectorXd& h_prev, const VectorXd& c_prev) {
    if (x.size() != p.features() || h_prev.size() != p.hidden() || c_prev.size() != p.hidden())
        throw std::invalid_argument("lstm_step: shape mismatch");
    const VectorXd i = sigmoid(p.wi * x + p.ui * h_prev + p.bi);
    const VectorXd f = sigmoid(p.wf * x + p.uf * h_prev + p.bf);
    const VectorXd o = sigmoid(p.wo * x + p.uo * h_prev + p.bo);
    const VectorXd g = (p.wg * x + p.ug * h_prev + p.bg).array().tanh();
    const VectorXd c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
    const VectorXd h = o.cwiseProduct(c.array().tanh().matrix());
    return {h, c};
}

// Per-step activations kept for backpropagation through time.
struct LstmTrace {
    std::vector<VectorXd> x, i, f, o, g, c, h;
};

inline LstmTrace lstm_forward(const LstmCellParams& p, const std::vector<VectorXd>& xs) {
    LstmTrace tr;
    VectorXd h = VectorXd::Zero(p.hidden());
    VectorXd c = VectorXd::Zero(p.hidden());
    for (const VectorXd& x : xs) {
        const VectorXd i = sigmoid(p.wi * x + p.ui * h + p.bi);
        const VectorXd f = sigmoid(p.wf * x + p.uf * h + p.bf);
        const VectorXd o = sigmoid(p.wo * x + p.uo * h + p.bo);
        const VectorXd g = (p.wg * x + p.ug * h + p.bg).array().tanh();
        c = f.cwiseProduct(c) + i.cwiseProduct(g);
        const VectorXd hn = o.cwiseProduct(c.array().tanh().matrix());
        tr.x.push_back(x);
        tr.i.push_back(i);
        tr.f.push_back(f);
        tr.o.push_back(o);
        tr.g.push_back(g);
        tr.c.push_back(c);
        tr.h.push_back(hn);
        h = hn;
    }
    return tr;
}

/// BPTT over a recorded forward trace. dh_seq[t] is the loss gradient at h_t.
/// Accumulates into `grads`; returns gradients with respect to the inputs.
inline std::vector<VectorXd> lstm_backward(const LstmCellParams& p, const LstmTrace& tr,
                                           const std::vector<VectorXd>& dh_seq,
                                           LstmCellParams& grads) {
    const std::size_t t_len = tr.h.size();
    const Eigen::Index hdim = p.hidden();
    std::vector<VectorXd> dx(t_len);
    VectorXd dh_next = VectorXd::Zero(hdim);
    VectorXd dc_next = VectorXd::Zero(hdim);
    for (std::size_t t = t_len; t-- > 0;) {
        const VectorXd dh = dh_seq[t] + dh_next;
        const VectorXd tc = tr.c[t].array().tanh();
        const VectorXd dov = dh.cwiseProduct(tc);
        VectorXd dc = dc_next +
                      dh.cwiseProduct(tr.o[t]).cwiseProduct(
                          (1.0 - tc.array().square()).matrix());
        const VectorXd c_prev = t > 0 ? tr.c[t - 1] : VectorXd::Zero(hdim);
        const VectorXd h_prev = t > 0 ? tr.h[t - 1] : VectorXd::Zero(hdim);
        const VectorXd di = dc.cwiseProduct(tr.g[t]);
        const VectorXd df = dc.cwiseProduct(c_prev);
        const VectorXd dg = dc.cwiseProduct(tr.i[t]);
        dc_next = dc.cwiseProduct(tr.f[t]);

        const VectorXd dpi = di.cwiseProduct(tr.i[t]).cwiseProduct((1.0 - tr.i[t].array()).matrix());
        const VectorXd dpf = df.cwiseProduct(tr.f[t]).cwiseProduct((1.0 - tr.f[t].array()).matrix());
        const VectorXd dpo = dov.cwiseProduct(tr.o[t]).cwiseProduct((1.0 - tr.o[t].array()).matrix());
        const VectorXd dpg = dg.cwiseProduct((1.0 - tr.g[t].array().square()).matrix());

        grads.wi += dpi * tr.x[t].transpose();
        grads.wf += dpf * tr.x[t].transpose();
        grads.wo += dpo * tr.x[t].transpose();
        grads.wg += dpg * tr.x[t].transpose();
        grads.ui += dpi * h_prev.transpose();
        grads.uf += dpf * h_prev.transpose();
        grads.uo += dpo * h_prev.transpose();
        grads.ug += dpg * h_prev.transpose();
        grads.bi += dpi;
        grads.bf += dpf;
        grads.bo += dpo;
        grads.bg += dpg;

        dx[t] = p.wi.transpose() * dpi + p.wf.transpose() * dpf + p.wo.transpose() * dpo +
                p.wg.transpose() * dpg;
        dh_next = p.ui.transpose() * dpi + p.uf.transpose() * dpf + p.uo.transpose() * dpo +
                  p.ug.transpose() * dpg;
    }
    return dx;
}

struct BiLstmParams {
    LstmCellParams forward;
    LstmCellParams backward;

    static BiLstmParams init(Eigen::Index hidden, Eigen::Index features,
                             std::mt19937_64& rng) {
        return {LstmCellParams::init(hidden, features, rng),
                LstmCellParams::init(hidden, features, rng)};
    }
};

/// Concatenated [forward_t ; backward_t] hidden states, both from zero initial state.
inline std::vector<VectorXd> bilstm_forward(const BiLstmParams& p,
                                            const std::vector<VectorXd>& xs) {
    if (xs.empty()) throw std::invalid_argument("bilstm_forward: empty sequence");
    const LstmTrace fwd = lstm_forward(p.forward, xs);
    std::vector<VectorXd> rev(xs.rbegin(), xs.rend());
    const LstmTrace bwd = lstm_forward(p.backward, rev);
    const std::size_t t_len = xs.size();
    std::vector<VectorXd> out(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        VectorXd h(p.forward.hidden() + p.backward.hidden());
        h << fwd.h[t], bwd.h[t_len - 1 - t];
        out[t] = h;
    }
    return out;
}

struct AttentionParams {
    VectorXd weight;  // 2H, scores are scalar per step
    double bias = 0.0;

    static AttentionParams init(Eigen::Index dim, std::mt19937_64& rng) {
        return {glorot_uniform(dim, 1, rng).col(0), 0.0};
    }
};

struct AttentionResult {
    VectorXd context;  // 2H
    VectorXd alpha;    // T, simplex
    VectorXd scores;   // T, e_j = tanh(w.h_j + b)
};

/// e_j = tanh(w.h_j + b); alpha = softmax(e) with max-subtraction; c = sum alpha_j h_j.
inline AttentionResult attention_forward(const AttentionParams& p,
                                         const std::vector<VectorXd>& h_seq) {
    if (h_seq.empty()) throw std::invalid_argument("attention_forward: empty sequence");
    const std::size_t t_len = h_seq.size();
    VectorXd e(t_len);
    for (std::size_t j = 0; j < t_len; ++j)
        e[static_cast<Eigen::Index>(j)] = std::tanh(p.weight.dot(h_seq[j]) + p.bias);
    const double emax = e.maxCoeff();
    VectorXd alpha = (e.array() - emax).exp();
    alpha /= alpha.sum();
    VectorXd c = VectorXd::Zero(h_seq.front().size());
    for (std::size_t j = 0; j < t_len; ++j) c += alpha[static_cast<Eigen::Index>(j)] * h_seq[j];
    return {c, alpha, e};
}

struct AttentionGrads {
    VectorXd weight;
    double bias = 0.0;
};

/// Gradient of the context with respect to attention params and hidden states.
inline std::vector<VectorXd> attention_backward(const AttentionParams& p,
                                                const std::vector<VectorXd>& h_seq,
                                                const AttentionResult& res,
                                                const VectorXd& dcontext,
                                                AttentionGrads& grads) {
    const std::size_t t_len = h_seq.size();
    std::vector<VectorXd> dh(t_len);
    VectorXd dalpha(t_len);
    for (std::size_t j = 0; j < t_len; ++j) {
        dh[j] = res.alpha[static_cast<Eigen::Index>(j)] * dcontext;
        dalpha[static_cast<Eigen::Index>(j)] = dcontext.dot(h_seq[j]);
    }
    const double dot = res.alpha.dot(dalpha);
    for (std::size_t j = 0; j < t_len; ++j) {
        const Eigen::Index ji = static_cast<Eigen::Index>(j);
        const double de = res.alpha[ji] * (dalpha[ji] - dot);
        const double dpre = (1.0 - res.scores[ji] * res.scores[ji]) * de;
        grads.weight += dpre * h_seq[j];
        grads.bias += dpre;
        dh[j] += dpre * p.weight;
    }
    return dh;
}

struct SoftmaxResult {
    double loss = 0.0;
    VectorXd probabilities;
};

inline SoftmaxResult softmax_cross_entropy(const VectorXd& logits, Eigen::Index label) {
    if (label < 0 || label >= logits.size())
        throw std::invalid_argument("softmax_cross_entropy: label out of range");
    const double zmax = logits.maxCoeff();
    VectorXd p = (logits.array() - zmax).exp();
    const double z = p.sum();
    p /= z;
    const double loss = -(logits[label] - zmax - std::log(z));
    return {loss, p};
}

/// Apply one gradient-descent step in place; throws on non-finite gradients.
inline void sgd_step(MatrixXd& param, const MatrixXd& grad, double lr) {
    if (!grad.allFinite()) throw std::runtime_error("sgd_step: non-finite gradient");
    param -= lr * grad;
}
inline void sgd_step(VectorXd& param, const VectorXd& grad, double lr) {
    if (!grad.allFinite()) throw std::runtime_error("sgd_step: non-finite gradient");
    param -= lr * grad;
}

}  // namespace chirp::nn
