#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "chirp/container.hpp"
#include "chirp/nn.hpp"

namespace chirp {

struct AutoencoderConfig {
    std::size_t input_dim = 2100;
    std::vector<std::size_t> hidden_sizes = {128};
    std::size_t reduced_dim = 200;
    std::size_t epochs = 50;
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;

    void validate() const {
        if (reduced_dim >= input_dim)
            throw std::invalid_argument("AutoencoderConfig: reduced_dim must be < input_dim");
        if (input_dim == 0 || reduced_dim == 0)
            throw std::invalid_argument("AutoencoderConfig: zero dimension");
    }
};

inline void to_json(nlohmann::json& j, const AutoencoderConfig& c) {
    j = {{"input_dim", c.input_dim},   {"hidden_sizes", c.hidden_sizes},
         {"reduced_dim", c.reduced_dim}, {"epochs", c.epochs},
         {"batch_size", c.batch_size}, {"learning_rate", c.learning_rate},
         {"seed", c.seed}};
}
inline void from_json(const nlohmann::json& j, AutoencoderConfig& c) {
    c.input_dim = j.value("input_dim", c.input_dim);
    c.hidden_sizes = j.value("hidden_sizes", c.hidden_sizes);
    c.reduced_dim = j.value("reduced_dim", c.reduced_dim);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.seed = j.value("seed", c.seed);
}

struct AeLayer {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
    bool tanh_activation = false;
};

struct AutoencoderParams {
    std::vector<AeLayer> encoder;  // input_dim -> hidden... -> reduced_dim
    std::vector<AeLayer> decoder;  // reduced_dim -> reversed hidden... -> input_dim
    // standardization statistics from the training split
    Eigen::VectorXd mean;
    Eigen::VectorXd stdev;
};

inline AutoencoderParams init_autoencoder(const AutoencoderConfig& config, std::uint64_t seed) {
    config.validate();
    AutoencoderParams p;
    std::mt19937_64 rng(seed);
    auto build = [&](const std::vector<std::size_t>& dims, std::vector<AeLayer>& out) {
        for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
            AeLayer layer;
            layer.weight = nn::glorot_uniform(static_cast<Eigen::Index>(dims[i + 1]),
                                              static_cast<Eigen::Index>(dims[i]), rng);
            layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dims[i + 1]));
            layer.tanh_activation = i + 2 < dims.size();  // last layer is linear
            out.push_back(std::move(layer));
        }
    };
    std::vector<std::size_t> enc_dims{config.input_dim};
    enc_dims.insert(enc_dims.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
    enc_dims.push_back(config.reduced_dim);
    std::vector<std::size_t> dec_dims{config.reduced_dim};
    dec_dims.insert(dec_dims.end(), config.hidden_sizes.rbegin(), config.hidden_sizes.rend());
    dec_dims.push_back(config.input_dim);
    build(enc_dims, p.encoder);
    build(dec_dims, p.decoder);
    p.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.input_dim));
    p.stdev = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(config.input_dim));
    return p;
}

namespace detail {

inline Eigen::VectorXd mlp_forward(const std::vector<AeLayer>& layers, Eigen::VectorXd x) {
    for (const AeLayer& l : layers) {
        if (x.size() != l.weight.cols())
            throw std::invalid_argument("autoencoder: dimension mismatch");
        x = l.weight * x + l.bias;
        if (l.tanh_activation) x = x.array().tanh();
    }
    return x;
}

}  // namespace detail

inline Eigen::VectorXd standardize(const AutoencoderParams& p, const Eigen::VectorXd& v) {
    if (v.size() != p.mean.size())
        throw std::invalid_argument("standardize: input length != input_dim");
    return (v - p.mean).cwiseQuotient(p.stdev);
}

inline Eigen::VectorXd encode(const AutoencoderParams& p, const Eigen::VectorXd& v) {
    return detail::mlp_forward(p.encoder, standardize(p, v));
}

inline Eigen::VectorXd decode(const AutoencoderParams& p, const Eigen::VectorXd& code) {
    return detail::mlp_forward(p.decoder, code);
}

struct AeGradients {
    std::vector<AeLayer> encoder, decoder;
};

namespace detail {

inline std::vector<AeLayer> zero_like(const std::vector<AeLayer>& layers) {
    std::vector<AeLayer> out;
    for (const AeLayer& l : layers)
        out.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                       Eigen::VectorXd::Zero(l.bias.size()), l.tanh_activation});
    return out;
}

}  // namespace detail

/// Forward pass on a standardized input plus gradient accumulation for one
/// example. Returns the per-example mean squared reconstruction error.
inline double autoencoder_example_backward(const AutoencoderParams& p,
                                           const Eigen::VectorXd& x_std, AeGradients& grads) {
    std::vector<const AeLayer*> layers;
    for (const AeLayer& l : p.encoder) layers.push_back(&l);
    for (const AeLayer& l : p.decoder) layers.push_back(&l);
    std::vector<AeLayer*> glayers;
    for (AeLayer& l : grads.encoder) glayers.push_back(&l);
    for (AeLayer& l : grads.decoder) glayers.push_back(&l);

    std::vector<Eigen::VectorXd> acts{x_std};
    for (const AeLayer* l : layers) {
        Eigen::VectorXd z = l->weight * acts.back() + l->bias;
        if (l->tanh_activation) z = z.array().tanh();
        acts.push_back(std::move(z));
    }
    const Eigen::VectorXd& recon = acts.back();
    const Eigen::VectorXd diff = recon - x_std;
    const double n = static_cast<double>(x_std.size());
    const double loss = diff.squaredNorm() / n;

    Eigen::VectorXd d = 2.0 * diff / n;
    for (std::size_t li = layers.size(); li-- > 0;) {
        if (layers[li]->tanh_activation)
            d = d.cwiseProduct((1.0 - acts[li + 1].array().square()).matrix());
        glayers[li]->weight += d * acts[li].transpose();
        glayers[li]->bias += d;
        d = layers[li]->weight.transpose() * d;
    }
    return loss;
}

struct AeTrainResult {
    AutoencoderParams params;
    std::vector<double> loss_history;  // mean per-example loss per epoch
};

/// Mini-batch gradient descent on mean squared reconstruction error.
/// Inputs are standardized with training-set statistics stored in the params.
inline AeTrainResult train_autoencoder(const std::vector<Eigen::VectorXd>& dataset,
                                       const AutoencoderConfig& config) {
    config.validate();
    if (dataset.empty()) throw std::invalid_argument("train_autoencoder: empty dataset");
    for (const auto& v : dataset)
        if (static_cast<std::size_t>(v.size()) != config.input_dim)
            throw std::invalid_argument("train_autoencoder: vector length != input_dim");

    AeTrainResult result;
    result.params = init_autoencoder(config, config.seed);
    AutoencoderParams& p = result.params;

    const Eigen::Index dim = static_cast<Eigen::Index>(config.input_dim);
    p.mean = Eigen::VectorXd::Zero(dim);
    for (const auto& v : dataset) p.mean += v;
    p.mean /= static_cast<double>(dataset.size());
    Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
    for (const auto& v : dataset) var += (v - p.mean).cwiseAbs2();
    var /= static_cast<double>(dataset.size());
    p.stdev = var.cwiseSqrt().cwiseMax(1e-8);

    std::vector<Eigen::VectorXd> xs;
    xs.reserve(dataset.size());
    for (const auto& v : dataset) xs.push_back(standardize(p, v));

    std::mt19937_64 rng(config.seed + 1);
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t bs = std::max<std::size_t>(1, config.batch_size);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t end = std::min(order.size(), start + bs);
            AeGradients grads{detail::zero_like(p.encoder), detail::zero_like(p.decoder)};
            for (std::size_t k = start; k < end; ++k)
                epoch_loss += autoencoder_example_backward(p, xs[order[k]], grads);
            const double scale = config.learning_rate / static_cast<double>(end - start);
            for (std::size_t li = 0; li < p.encoder.size(); ++li) {
                p.encoder[li].weight -= scale * grads.encoder[li].weight;
                p.encoder[li].bias -= scale * grads.encoder[li].bias;
            }
            for (std::size_t li = 0; li < p.decoder.size(); ++li) {
                p.decoder[li].weight -= scale * grads.decoder[li].weight;
                p.decoder[li].bias -= scale * grads.decoder[li].bias;
            }
        }
        epoch_loss /= static_cast<double>(xs.size());
        if (!std::isfinite(epoch_loss))
            throw std::runtime_error("train_autoencoder: diverged at epoch " +
                                     std::to_string(epoch));
        result.loss_history.push_back(epoch_loss);
    }
    return result;
}

inline std::vector<Eigen::VectorXd> reduce_dataset(const AutoencoderParams& p,
                                                   const std::vector<Eigen::VectorXd>& dataset) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(dataset.size());
    for (const auto& v : dataset) out.push_back(encode(p, v));
    return out;
}

// Serialization to the binary container.

inline container::Archive autoencoder_to_archive(const AutoencoderParams& p,
                                                 const AutoencoderConfig& config) {
    container::Archive a;
    a.meta["kind"] = "autoencoder";
    a.meta["config"] = config;
    auto dump = [&](const char* prefix, const std::vector<AeLayer>& layers) {
        for (std::size_t i = 0; i < layers.size(); ++i) {
            a.add(std::string(prefix) + "_w" + std::to_string(i), layers[i].weight);
            a.add(std::string(prefix) + "_b" + std::to_string(i), layers[i].bias);
            a.meta[std::string(prefix) + "_tanh"].push_back(layers[i].tanh_activation);
        }
    };
    dump("enc", p.encoder);
    dump("dec", p.decoder);
    a.add("mean", p.mean);
    a.add("stdev", p.stdev);
    return a;
}

inline AutoencoderParams autoencoder_from_archive(const container::Archive& a) {
    AutoencoderParams p;
    auto read = [&](const char* prefix, std::vector<AeLayer>& layers) {
        const auto& flags = a.meta.at(std::string(prefix) + "_tanh");
        for (std::size_t i = 0; i < flags.size(); ++i)
            layers.push_back({a.get(std::string(prefix) + "_w" + std::to_string(i)),
                              a.get_vector(std::string(prefix) + "_b" + std::to_string(i)),
                              flags[i].get<bool>()});
    };
    read("enc", p.encoder);
    read("dec", p.decoder);
    p.mean = a.get_vector("mean");
    p.stdev = a.get_vector("stdev");
    return p;
}

}  // namespace chirp
