#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "chirp/autoencoder.hpp"
#include "chirp/container.hpp"
#include "chirp/mfcc.hpp"
#include "chirp/nn.hpp"
#include "chirp/rearrange.hpp"

namespace chirp {

enum class ModelVariant { MD, MDR, MDRR };

inline std::string to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::MD: return "MD";
        case ModelVariant::MDR: return "MDR";
        case ModelVariant::MDRR: return "MDRR";
    }
    throw std::logic_error("unknown variant");
}

inline ModelVariant variant_from_string(const std::string& s) {
    if (s == "MD") return ModelVariant::MD;
    if (s == "MDR") return ModelVariant::MDR;
    if (s == "MDRR") return ModelVariant::MDRR;
    throw std::invalid_argument("unknown variant: " + s);
}

struct ClassifierConfig {
    std::size_t seq_len = 20;       // T
    std::size_t features = 10;      // F per step
    std::size_t hidden = 64;        // H per direction
    std::size_t classes = 2;        // C
    std::size_t epochs = 100;
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    std::size_t plateau_patience = 3;
    double decay_factor = 0.5;
    std::size_t early_stop_patience = 10;
    std::uint64_t seed = 0;

    void validate() const {
        if (seq_len == 0 || features == 0 || hidden == 0)
            throw std::invalid_argument("ClassifierConfig: zero dimension");
        if (classes < 2) throw std::invalid_argument("ClassifierConfig: need >= 2 classes");
        if (decay_factor <= 0.0 || decay_factor > 1.0)
            throw std::invalid_argument("ClassifierConfig: decay_factor must be in (0,1]");
    }
};

inline void to_json(nlohmann::json& j, const ClassifierConfig& c) {
    j = {{"seq_len", c.seq_len},
         {"features", c.features},
         {"hidden", c.hidden},
         {"classes", c.classes},
         {"epochs", c.epochs},
         {"batch_size", c.batch_size},
         {"learning_rate", c.learning_rate},
         {"plateau_patience", c.plateau_patience},
         {"decay_factor", c.decay_factor},
         {"early_stop_patience", c.early_stop_patience},
         {"seed", c.seed}};
}
inline void from_json(const nlohmann::json& j, ClassifierConfig& c) {
    c.seq_len = j.value("seq_len", c.seq_len);
    c.features = j.value("features", c.features);
    c.hidden = j.value("hidden", c.hidden);
    c.classes = j.value("classes", c.classes);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.plateau_patience = j.value("plateau_patience", c.plateau_patience);
    c.decay_factor = j.value("decay_factor", c.decay_factor);
    c.early_stop_patience = j.value("early_stop_patience", c.early_stop_patience);
    c.seed = j.value("seed", c.seed);
}

struct BiLstmAttentionModel {
    nn::BiLstmParams bilstm;
    nn::AttentionParams attention;
    nn::DenseParams head;  // 2H -> C

    static BiLstmAttentionModel init(const ClassifierConfig& cfg, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        BiLstmAttentionModel m;
        m.bilstm = nn::BiLstmParams::init(static_cast<Eigen::Index>(cfg.hidden),
                                          static_cast<Eigen::Index>(cfg.features), rng);
        m.attention =
            nn::AttentionParams::init(static_cast<Eigen::Index>(2 * cfg.hidden), rng);
        m.head = nn::DenseParams::init(static_cast<Eigen::Index>(cfg.classes),
                                       static_cast<Eigen::Index>(2 * cfg.hidden), rng);
        return m;
    }
};

struct ModelGradients {
    nn::LstmCellParams fwd, bwd;
    nn::AttentionGrads attention;
    Eigen::MatrixXd head_weight;
    Eigen::VectorXd head_bias;

    static ModelGradients zero(const BiLstmAttentionModel& m) {
        ModelGradients g;
        g.fwd = nn::LstmCellParams::zeros_like(m.bilstm.forward);
        g.bwd = nn::LstmCellParams::zeros_like(m.bilstm.backward);
        g.attention.weight = Eigen::VectorXd::Zero(m.attention.weight.size());
        g.attention.bias = 0.0;
        g.head_weight = Eigen::MatrixXd::Zero(m.head.weight.rows(), m.head.weight.cols());
        g.head_bias = Eigen::VectorXd::Zero(m.head.bias.size());
        return g;
    }
};

struct ForwardTrace {
    nn::LstmTrace fwd, bwd;                // bwd over the reversed sequence
    std::vector<Eigen::VectorXd> h_seq;    // concatenated states
    nn::AttentionResult attention;
    Eigen::VectorXd logits;
    nn::SoftmaxResult softmax;
};

inline ForwardTrace forward_trace(const BiLstmAttentionModel& m,
                                  const std::vector<Eigen::VectorXd>& xs,
                                  Eigen::Index label = 0) {
    if (xs.empty()) throw std::invalid_argument("forward_trace: empty sequence");
    ForwardTrace tr;
    tr.fwd = nn::lstm_forward(m.bilstm.forward, xs);
    std::vector<Eigen::VectorXd> rev(xs.rbegin(), xs.rend());
    tr.bwd = nn::lstm_forward(m.bilstm.backward, rev);
    const std::size_t t_len = xs.size();
    tr.h_seq.resize(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        Eigen::VectorXd h(tr.fwd.h[t].size() + tr.bwd.h[t_len - 1 - t].size());
        h << tr.fwd.h[t], tr.bwd.h[t_len - 1 - t];
        tr.h_seq[t] = h;
    }
    tr.attention = nn::attention_forward(m.attention, tr.h_seq);
    tr.logits = m.head.forward(tr.attention.context);
    tr.softmax = nn::softmax_cross_entropy(tr.logits, label);
    return tr;
}

/// Probabilities for one prepared input: bilstm -> attention -> dense -> softmax.
inline Eigen::VectorXd forward_classify(const BiLstmAttentionModel& m,
                                        const std::vector<Eigen::VectorXd>& xs) {
    return forward_trace(m, xs).softmax.probabilities;
}

/// Argmax with lowest-index tie-breaking.
inline std::size_t predict(const BiLstmAttentionModel& m,
                           const std::vector<Eigen::VectorXd>& xs) {
    const Eigen::VectorXd p = forward_classify(m, xs);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;
    return static_cast<std::size_t>(best);
}

/// Cross-entropy loss plus exact reverse-mode gradients accumulated into `grads`.
inline double model_backward(const BiLstmAttentionModel& m,
                             const std::vector<Eigen::VectorXd>& xs, Eigen::Index label,
                             ModelGradients& grads) {
    const ForwardTrace tr = forward_trace(m, xs, label);
    Eigen::VectorXd dlogits = tr.softmax.probabilities;
    dlogits[label] -= 1.0;
    grads.head_weight += dlogits * tr.attention.context.transpose();
    grads.head_bias += dlogits;
    const Eigen::VectorXd dcontext = m.head.weight.transpose() * dlogits;

    std::vector<Eigen::VectorXd> dh =
        nn::attention_backward(m.attention, tr.h_seq, tr.attention, dcontext, grads.attention);

    const std::size_t t_len = xs.size();
    const Eigen::Index hdim = m.bilstm.forward.hidden();
    std::vector<Eigen::VectorXd> dh_fwd(t_len), dh_bwd(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        dh_fwd[t] = dh[t].head(hdim);
        dh_bwd[t_len - 1 - t] = dh[t].tail(hdim);  // reversed-order trace
    }
    nn::lstm_backward(m.bilstm.forward, tr.fwd, dh_fwd, grads.fwd);
    nn::lstm_backward(m.bilstm.backward, tr.bwd, dh_bwd, grads.bwd);
    return tr.softmax.loss;
}

inline void apply_gradients(BiLstmAttentionModel& m, const ModelGradients& g, double lr) {
    auto cell = [lr](nn::LstmCellParams& p, const nn::LstmCellParams& gr) {
        nn::sgd_step(p.wi, gr.wi, lr); nn::sgd_step(p.wf, gr.wf, lr);
        nn::sgd_step(p.wo, gr.wo, lr); nn::sgd_step(p.wg, gr.wg, lr);
        nn::sgd_step(p.ui, gr.ui, lr); nn::sgd_step(p.uf, gr.uf, lr);
        nn::sgd_step(p.uo, gr.uo, lr); nn::sgd_step(p.ug, gr.ug, lr);
        nn::sgd_step(p.bi, gr.bi, lr); nn::sgd_step(p.bf, gr.bf, lr);
        nn::sgd_step(p.bo, gr.bo, lr); nn::sgd_step(p.bg, gr.bg, lr);
    };
    cell(m.bilstm.forward, g.fwd);
    cell(m.bilstm.backward, g.bwd);
    nn::sgd_step(m.attention.weight, g.attention.weight, lr);
    if (!std::isfinite(g.attention.bias))
        throw std::runtime_error("apply_gradients: non-finite gradient");
    m.attention.bias -= lr * g.attention.bias;
    nn::sgd_step(m.head.weight, g.head_weight, lr);
    nn::sgd_step(m.head.bias, g.head_bias, lr);
}

// Input preparation per variant.

/// MD: the raw MFCC frame sequence, truncated or zero-padded along time to T frames.
inline std::vector<Eigen::VectorXd> prepare_input_md(const FeatureMatrix& m,
                                                     std::size_t seq_len) {
    if (static_cast<std::size_t>(m.values.rows()) == 0)
        throw std::invalid_argument("prepare_input_md: empty feature matrix");
    std::vector<Eigen::VectorXd> xs(seq_len);
    for (std::size_t t = 0; t < seq_len; ++t) {
        if (t < m.cols())
            xs[t] = m.values.col(static_cast<Eigen::Index>(t));
        else
            xs[t] = Eigen::VectorXd::Zero(m.values.rows());
    }
    return xs;
}

/// MDR / MDRR: a flat vector reshaped row-major to (T, F); element k lands at
/// step k/F, feature k mod F. Requires T*F == len(v).
inline std::vector<Eigen::VectorXd> prepare_input_flat(const Eigen::VectorXd& v,
                                                       std::size_t seq_len,
                                                       std::size_t features) {
    if (static_cast<std::size_t>(v.size()) != seq_len * features)
        throw std::invalid_argument("prepare_input: T*F = " +
                                    std::to_string(seq_len * features) +
                                    " does not match vector length " +
                                    std::to_string(v.size()));
    std::vector<Eigen::VectorXd> xs(seq_len);
    for (std::size_t t = 0; t < seq_len; ++t)
        xs[t] = v.segment(static_cast<Eigen::Index>(t * features),
                          static_cast<Eigen::Index>(features));
    return xs;
}

struct TrainingExample {
    std::vector<Eigen::VectorXd> input;
    std::size_t label = 0;
};

struct EpochRecord {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double learning_rate = 0.0;
};

struct TrainResult {
    BiLstmAttentionModel model;  // best-validation-loss checkpoint
    std::vector<EpochRecord> log;
    std::size_t best_epoch = 0;
};

inline double evaluate_loss(const BiLstmAttentionModel& m,
                            const std::vector<TrainingExample>& data, double* accuracy) {
    double loss = 0.0;
    std::size_t correct = 0;
    for (const auto& ex : data) {
        const ForwardTrace tr =
            forward_trace(m, ex.input, static_cast<Eigen::Index>(ex.label));
        loss += tr.softmax.loss;
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < tr.softmax.probabilities.size(); ++i)
            if (tr.softmax.probabilities[i] > tr.softmax.probabilities[best]) best = i;
        if (static_cast<std::size_t>(best) == ex.label) ++correct;
    }
    if (accuracy)
        *accuracy = data.empty() ? 0.0 : static_cast<double>(correct) / data.size();
    return data.empty() ? 0.0 : loss / static_cast<double>(data.size());
}

/// Mini-batch training with reduce-on-plateau learning rate and early stopping.
/// Returns the parameters with the best validation loss seen.
inline TrainResult train_classifier(const std::vector<TrainingExample>& train,
                                    const std::vector<TrainingExample>& val,
                                    const ClassifierConfig& config) {
    config.validate();
    if (train.empty() || val.empty())
        throw std::invalid_argument("train_classifier: empty split");
    for (const auto& ex : train)
        if (ex.label >= config.classes)
            throw std::invalid_argument("train_classifier: label out of range");

    TrainResult result;
    BiLstmAttentionModel model = BiLstmAttentionModel::init(config, config.seed);
    result.model = model;

    double lr = config.learning_rate;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t epochs_since_best = 0;
    std::size_t epochs_since_plateau = 0;

    std::mt19937_64 rng(config.seed + 17);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t bs = std::max<std::size_t>(1, config.batch_size);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double train_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t end = std::min(order.size(), start + bs);
            ModelGradients grads = ModelGradients::zero(model);
            for (std::size_t k = start; k < end; ++k)
                train_loss += model_backward(model, train[order[k]].input,
                                             static_cast<Eigen::Index>(train[order[k]].label),
                                             grads);
            apply_gradients(model, grads, lr / static_cast<double>(end - start));
        }
        train_loss /= static_cast<double>(train.size());
        if (!std::isfinite(train_loss))
            throw std::runtime_error("train_classifier: diverged at epoch " +
                                     std::to_string(epoch));

        EpochRecord rec;
        rec.train_loss = train_loss;
        rec.val_loss = evaluate_loss(model, val, &rec.val_accuracy);
        rec.learning_rate = lr;
        result.log.push_back(rec);

        if (rec.val_loss < best_val - 1e-12) {
            best_val = rec.val_loss;
            result.model = model;
            result.best_epoch = epoch;
            epochs_since_best = 0;
            epochs_since_plateau = 0;
        } else {
            ++epochs_since_best;
            ++epochs_since_plateau;
            if (epochs_since_plateau >= config.plateau_patience) {
                lr *= config.decay_factor;
                epochs_since_plateau = 0;
            }
            if (epochs_since_best >= config.early_stop_patience) break;
        }
    }
    return result;
}

// Checkpoint serialization.

inline container::Archive model_to_archive(const BiLstmAttentionModel& m,
                                           const ClassifierConfig& config,
                                           const std::string& variant) {
    container::Archive a;
    a.meta["kind"] = "classifier";
    a.meta["model_variant"] = variant;
    a.meta["config"] = config;
    auto cell = [&](const char* prefix, const nn::LstmCellParams& p) {
        a.add(std::string(prefix) + "_wi", p.wi); a.add(std::string(prefix) + "_wf", p.wf);
        a.add(std::string(prefix) + "_wo", p.wo); a.add(std::string(prefix) + "_wg", p.wg);
        a.add(std::string(prefix) + "_ui", p.ui); a.add(std::string(prefix) + "_uf", p.uf);
        a.add(std::string(prefix) + "_uo", p.uo); a.add(std::string(prefix) + "_ug", p.ug);
        a.add(std::string(prefix) + "_bi", p.bi); a.add(std::string(prefix) + "_bf", p.bf);
        a.add(std::string(prefix) + "_bo", p.bo); a.add(std::string(prefix) + "_bg", p.bg);
    };
    cell("fwd", m.bilstm.forward);
    cell("bwd", m.bilstm.backward);
    a.add("att_w", m.attention.weight);
    a.meta["att_b"] = m.attention.bias;
    a.add("head_w", m.head.weight);
    a.add("head_b", m.head.bias);
    return a;
}

inline BiLstmAttentionModel model_from_archive(const container::Archive& a) {
    BiLstmAttentionModel m;
    auto cell = [&](const char* prefix, nn::LstmCellParams& p) {
        p.wi = a.get(std::string(prefix) + "_wi"); p.wf = a.get(std::string(prefix) + "_wf");
        p.wo = a.get(std::string(prefix) + "_wo"); p.wg = a.get(std::string(prefix) + "_wg");
        p.ui = a.get(std::string(prefix) + "_ui"); p.uf = a.get(std::string(prefix) + "_uf");
        p.uo = a.get(std::string(prefix) + "_uo"); p.ug = a.get(std::string(prefix) + "_ug");
        p.bi = a.get_vector(std::string(prefix) + "_bi");
        p.bf = a.get_vector(std::string(prefix) + "_bf");
        p.bo = a.get_vector(std::string(prefix) + "_bo");
        p.bg = a.get_vector(std::string(prefix) + "_bg");
    };
    cell("fwd", m.bilstm.forward);
    cell("bwd", m.bilstm.backward);
    m.attention.weight = a.get_vector("att_w");
    m.attention.bias = a.meta.at("att_b").get<double>();
    m.head.weight = a.get("head_w");
    m.head.bias = a.get_vector("head_b");
    return m;
}

}  // namespace chirp
