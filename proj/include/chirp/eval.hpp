#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chirp/metrics.hpp"
#include "chirp/pipeline.hpp"

namespace chirp {

struct AblationRow {
    std::string variant;
    MetricsReport report;
    std::string error;  // non-empty when this variant failed
};

inline MetricsReport evaluate_split(const BiLstmAttentionModel& model,
                                    const std::vector<TrainingExample>& split,
                                    std::size_t classes) {
    std::vector<std::size_t> truth, pred;
    for (const auto& ex : split) {
        truth.push_back(ex.label);
        pred.push_back(predict(model, ex.input));
    }
    return metrics(confusion(truth, pred, classes));
}

/// Train MD, MDR, MDRR on shared splits and report test metrics per variant.
/// A failing variant is reported in its row without aborting the others.
inline std::vector<AblationRow> run_ablation(const FeatureDataset& ds, const RunConfig& config) {
    std::vector<AblationRow> rows;
    for (ModelVariant v : {ModelVariant::MD, ModelVariant::MDR, ModelVariant::MDRR}) {
        AblationRow row;
        row.variant = to_string(v);
        try {
            const VariantData data = build_variant_data(ds, v, config);
            const ClassifierConfig cc = variant_classifier_config(config, v, ds.classes());
            const TrainResult tr = train_classifier(data.train, data.val, cc);
            row.report = evaluate_split(tr.model, data.test, ds.classes());
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct SweepSpec {
    std::string parameter;  // slice_len | max_dim | reduced_dim | autoencoder_hidden | input_shape
    std::vector<nlohmann::json> values;
    std::vector<std::uint64_t> seeds{0};

    void validate() const {
        static const std::vector<std::string> known{"slice_len", "max_dim", "reduced_dim",
                                                    "autoencoder_hidden", "input_shape"};
        if (std::find(known.begin(), known.end(), parameter) == known.end())
            throw std::invalid_argument("SweepSpec: unknown parameter " + parameter);
        if (values.empty()) throw std::invalid_argument("SweepSpec: empty value list");
        if (seeds.empty()) throw std::invalid_argument("SweepSpec: empty seed list");
    }
};

inline void from_json(const nlohmann::json& j, SweepSpec& s) {
    s.parameter = j.at("parameter").get<std::string>();
    for (const auto& v : j.at("values")) s.values.push_back(v);
    if (j.contains("seeds")) s.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
}

struct SweepRow {
    std::string value;
    std::uint64_t seed = 0;
    MetricsReport report;
    bool skipped = false;
    std::string skip_reason;
};

/// Apply one sweep value to a copy of the base config. Throws with a reason
/// when the combination is inconsistent; callers record it as skipped.
inline RunConfig apply_sweep_value(const RunConfig& base, const std::string& parameter,
                                   const nlohmann::json& value) {
    RunConfig c = base;
    if (parameter == "slice_len") {
        c.rearrange.slice_len = value.get<std::size_t>();
    } else if (parameter == "max_dim") {
        c.rearrange.max_dim = value.get<std::size_t>();
        c.autoencoder.input_dim = c.rearrange.max_dim;
        // keep the MDR feature width, adjust T
        if (c.rearrange.max_dim % c.mdr_shape.features != 0)
            throw std::invalid_argument("max_dim not divisible by MDR feature width");
        c.mdr_shape.seq_len = c.rearrange.max_dim / c.mdr_shape.features;
    } else if (parameter == "reduced_dim") {
        c.autoencoder.reduced_dim = value.get<std::size_t>();
        if (c.autoencoder.reduced_dim % c.mdrr_shape.features != 0)
            throw std::invalid_argument("reduced_dim not divisible by input-shape feature width");
        c.mdrr_shape.seq_len = c.autoencoder.reduced_dim / c.mdrr_shape.features;
    } else if (parameter == "autoencoder_hidden") {
        if (value.is_array())
            c.autoencoder.hidden_sizes = value.get<std::vector<std::size_t>>();
        else
            c.autoencoder.hidden_sizes = {value.get<std::size_t>()};
    } else if (parameter == "input_shape") {
        c.mdrr_shape = value.get<InputShape>();
        if (c.mdrr_shape.seq_len * c.mdrr_shape.features != c.autoencoder.reduced_dim)
            throw std::invalid_argument("input_shape T*F != reduced_dim");
    } else {
        throw std::invalid_argument("unknown sweep parameter " + parameter);
    }
    c.validate();
    return c;
}

/// Retrain MDRR per (value, seed) holding everything else at the base config.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const FeatureDataset& ds,
                                       const RunConfig& base,
                                       const std::function<void(const SweepRow&)>& on_row = {}) {
    spec.validate();
    std::vector<SweepRow> rows;
    for (const auto& value : spec.values) {
        for (std::uint64_t seed : spec.seeds) {
            SweepRow row;
            row.value = value.dump();
            row.seed = seed;
            try {
                RunConfig c = apply_sweep_value(base, spec.parameter, value);
                c.seed = seed;
                c.autoencoder.seed = seed;
                c.classifier.seed = seed;
                const VariantData data = build_variant_data(ds, ModelVariant::MDRR, c);
                const ClassifierConfig cc =
                    variant_classifier_config(c, ModelVariant::MDRR, ds.classes());
                const TrainResult tr = train_classifier(data.train, data.val, cc);
                row.report = evaluate_split(tr.model, data.test, ds.classes());
            } catch (const std::exception& e) {
                row.skipped = true;
                row.skip_reason = e.what();
            }
            if (on_row) on_row(row);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace chirp
