#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chirp/autoencoder.hpp"
#include "chirp/classifier.hpp"
#include "chirp/dataset.hpp"
#include "chirp/mfcc.hpp"
#include "chirp/rearrange.hpp"
#include "chirp/wav.hpp"

namespace chirp {

struct InputShape {
    std::size_t seq_len = 20;
    std::size_t features = 10;
};

inline void to_json(nlohmann::json& j, const InputShape& s) {
    j = nlohmann::json::array({s.seq_len, s.features});
}
inline void from_json(const nlohmann::json& j, InputShape& s) {
    s.seq_len = j.at(0).get<std::size_t>();
    s.features = j.at(1).get<std::size_t>();
}

/// One JSON config for the whole run, mirroring each stage's config type.
struct RunConfig {
    MfccConfig mfcc;
    RearrangeConfig rearrange;
    AutoencoderConfig autoencoder;
    ClassifierConfig classifier;
    std::size_t md_seq_len = 100;          // MD: T frames of D coefficients
    InputShape mdr_shape{21, 100};         // T*F = rearrange.max_dim
    InputShape mdrr_shape{20, 10};         // T*F = autoencoder.reduced_dim
    std::size_t min_samples = 4;
    std::array<double, 3> split_ratios{0.7, 0.2, 0.1};
    bool standardize_inputs = true;  // per-feature train-split statistics
    std::uint64_t seed = 0;

    void validate() const {
        rearrange.validate();
        classifier.validate();
        if (autoencoder.input_dim != rearrange.max_dim)
            throw std::invalid_argument("RunConfig: autoencoder.input_dim must equal max_dim");
        if (mdr_shape.seq_len * mdr_shape.features != rearrange.max_dim)
            throw std::invalid_argument("RunConfig: mdr_shape T*F must equal max_dim");
        if (mdrr_shape.seq_len * mdrr_shape.features != autoencoder.reduced_dim)
            throw std::invalid_argument("RunConfig: mdrr_shape T*F must equal reduced_dim");
    }
};

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = {{"mfcc", c.mfcc},
         {"rearrange", c.rearrange},
         {"autoencoder", c.autoencoder},
         {"classifier", c.classifier},
         {"md_seq_len", c.md_seq_len},
         {"mdr_shape", c.mdr_shape},
         {"mdrr_shape", c.mdrr_shape},
         {"min_samples", c.min_samples},
         {"split_ratios", c.split_ratios},
         {"standardize_inputs", c.standardize_inputs},
         {"seed", c.seed}};
}
inline void from_json(const nlohmann::json& j, RunConfig& c) {
    if (j.contains("mfcc")) c.mfcc = j["mfcc"].get<MfccConfig>();
    if (j.contains("rearrange")) c.rearrange = j["rearrange"].get<RearrangeConfig>();
    if (j.contains("autoencoder")) c.autoencoder = j["autoencoder"].get<AutoencoderConfig>();
    if (j.contains("classifier")) c.classifier = j["classifier"].get<ClassifierConfig>();
    c.md_seq_len = j.value("md_seq_len", c.md_seq_len);
    if (j.contains("mdr_shape")) c.mdr_shape = j["mdr_shape"].get<InputShape>();
    if (j.contains("mdrr_shape")) c.mdrr_shape = j["mdrr_shape"].get<InputShape>();
    c.min_samples = j.value("min_samples", c.min_samples);
    if (j.contains("split_ratios")) c.split_ratios = j["split_ratios"].get<std::array<double, 3>>();
    c.standardize_inputs = j.value("standardize_inputs", c.standardize_inputs);
    c.seed = j.value("seed", c.seed);
}

/// Per-clip MFCC features for all three splits, with a shared class index.
struct FeatureDataset {
    struct Item {
        std::string id;
        std::size_t label = 0;
        FeatureMatrix features;
    };
    std::vector<Item> train, val, test;
    std::vector<std::string> class_names;

    std::size_t classes() const { return class_names.size(); }
};

inline std::map<std::string, std::size_t> class_index(const SplitAssignment& split) {
    std::set<std::string> labels;
    for (const auto* part : {&split.train, &split.val, &split.test})
        for (const auto& e : *part) labels.insert(e.label);
    std::map<std::string, std::size_t> index;
    std::size_t i = 0;
    for (const auto& l : labels) index[l] = i++;
    return index;
}

inline FeatureDataset extract_features(const SplitAssignment& split, const MfccConfig& config) {
    const auto index = class_index(split);
    FeatureDataset ds;
    ds.class_names.resize(index.size());
    for (const auto& [label, i] : index) ds.class_names[i] = label;
    auto fill = [&](const std::vector<ManifestEntry>& entries,
                    std::vector<FeatureDataset::Item>& out) {
        for (const auto& e : entries) {
            AudioClip clip = load_wav(e.path);
            out.push_back({e.path, index.at(e.label), extract_mfcc(clip, config)});
        }
    };
    fill(split.train, ds.train);
    fill(split.val, ds.val);
    fill(split.test, ds.test);
    return ds;
}

struct VariantData {
    std::vector<TrainingExample> train, val, test;
    std::optional<AutoencoderParams> autoencoder;  // present for MDRR
};

/// Per-feature standardization with statistics from the training split only.
inline void standardize_variant_data(VariantData& data) {
    if (data.train.empty()) return;
    const Eigen::Index dim = data.train.front().input.front().size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    std::size_t count = 0;
    for (const auto& ex : data.train)
        for (const auto& x : ex.input) {
            mean += x;
            ++count;
        }
    mean /= static_cast<double>(count);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
    for (const auto& ex : data.train)
        for (const auto& x : ex.input) var += (x - mean).cwiseAbs2();
    var /= static_cast<double>(count);
    const Eigen::VectorXd stdev = var.cwiseSqrt().cwiseMax(1e-8);
    for (auto* split : {&data.train, &data.val, &data.test})
        for (auto& ex : *split)
            for (auto& x : ex.input) x = (x - mean).cwiseQuotient(stdev);
}

/// Build classifier-ready inputs for one variant. The autoencoder, when used,
/// is fit on the training split only.
inline VariantData build_variant_data(const FeatureDataset& ds, ModelVariant variant,
                                      const RunConfig& config) {
    VariantData out;
    auto md = [&](const std::vector<FeatureDataset::Item>& items,
                  std::vector<TrainingExample>& dst) {
        for (const auto& it : items)
            dst.push_back({prepare_input_md(it.features, config.md_seq_len), it.label});
    };
    auto capped = [&](const FeatureDataset::Item& it) {
        const CappedVector cv = rearrange_pipeline(it.features, config.rearrange);
        return Eigen::Map<const Eigen::VectorXd>(cv.values.data(),
                                                 static_cast<Eigen::Index>(cv.values.size()))
            .eval();
    };
    switch (variant) {
        case ModelVariant::MD:
            md(ds.train, out.train);
            md(ds.val, out.val);
            md(ds.test, out.test);
            break;
        case ModelVariant::MDR: {
            auto fill = [&](const std::vector<FeatureDataset::Item>& items,
                            std::vector<TrainingExample>& dst) {
                for (const auto& it : items)
                    dst.push_back({prepare_input_flat(capped(it), config.mdr_shape.seq_len,
                                                      config.mdr_shape.features),
                                   it.label});
            };
            fill(ds.train, out.train);
            fill(ds.val, out.val);
            fill(ds.test, out.test);
            break;
        }
        case ModelVariant::MDRR: {
            std::vector<Eigen::VectorXd> train_vecs;
            for (const auto& it : ds.train) train_vecs.push_back(capped(it));
            AeTrainResult ae = train_autoencoder(train_vecs, config.autoencoder);
            out.autoencoder = ae.params;
            auto fill = [&](const std::vector<FeatureDataset::Item>& items,
                            std::vector<TrainingExample>& dst) {
                for (const auto& it : items)
                    dst.push_back({prepare_input_flat(encode(*out.autoencoder, capped(it)),
                                                      config.mdrr_shape.seq_len,
                                                      config.mdrr_shape.features),
                                   it.label});
            };
            fill(ds.train, out.train);
            fill(ds.val, out.val);
            fill(ds.test, out.test);
            break;
        }
    }
    if (config.standardize_inputs) standardize_variant_data(out);
    return out;
}

/// Classifier config specialized to a variant's input geometry.
inline ClassifierConfig variant_classifier_config(const RunConfig& config,
                                                  ModelVariant variant,
                                                  std::size_t classes) {
    ClassifierConfig c = config.classifier;
    c.classes = classes;
    switch (variant) {
        case ModelVariant::MD:
            c.seq_len = config.md_seq_len;
            c.features = config.mfcc.coefficients;
            break;
        case ModelVariant::MDR:
            c.seq_len = config.mdr_shape.seq_len;
            c.features = config.mdr_shape.features;
            break;
        case ModelVariant::MDRR:
            c.seq_len = config.mdrr_shape.seq_len;
            c.features = config.mdrr_shape.features;
            break;
    }
    return c;
}

}  // namespace chirp
