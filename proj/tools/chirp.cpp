// chirp: animal sound classification pipeline driver.
// Subcommands: ingest, extract, train, eval, sweep, cluster.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "chirp/cluster.hpp"
#include "chirp/container.hpp"
#include "chirp/dataset.hpp"
#include "chirp/eval.hpp"
#include "chirp/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

chirp::RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_flag) {
    chirp::RunConfig cfg;
    if (!path.empty()) {
        std::ifstream f(path);
        if (!f) throw std::invalid_argument("cannot open config file: " + path);
        cfg = json::parse(f).get<chirp::RunConfig>();
    }
    if (seed_flag) {
        cfg.seed = *seed_flag;
        cfg.autoencoder.seed = *seed_flag;
        cfg.classifier.seed = *seed_flag;
    }
    cfg.validate();
    return cfg;
}

void write_run_manifest(const fs::path& out, const chirp::RunConfig& cfg,
                        const std::vector<fs::path>& inputs) {
    json m;
    m["config_hash"] = chirp::fnv1a(json(cfg).dump());
    m["seed"] = cfg.seed;
    json hashes = json::object();
    for (const auto& p : inputs)
        if (fs::exists(p)) hashes[p.string()] = chirp::hash_file(p);
    m["input_hashes"] = hashes;
    std::ofstream(out / "run_manifest.json") << m.dump(2) << "\n";
}

// ---- feature store ----------------------------------------------------------

struct StoreEntry {
    std::string file;      // container file, relative to the store dir
    std::string path;      // source wav
    std::string label;
    std::string split;     // train | val | test
    std::uint64_t source_hash = 0;
    std::uint64_t config_hash = 0;
};

json store_index_to_json(const std::vector<StoreEntry>& entries) {
    json j = json::array();
    for (const auto& e : entries)
        j.push_back({{"file", e.file},
                     {"path", e.path},
                     {"label", e.label},
                     {"split", e.split},
                     {"source_hash", e.source_hash},
                     {"config_hash", e.config_hash}});
    return j;
}

std::vector<StoreEntry> store_index_from_json(const json& j) {
    std::vector<StoreEntry> out;
    for (const auto& e : j)
        out.push_back({e.at("file"), e.at("path"), e.at("label"), e.at("split"),
                       e.at("source_hash"), e.at("config_hash")});
    return out;
}

chirp::FeatureDataset load_feature_store(const fs::path& dir) {
    std::ifstream f(dir / "index.json");
    if (!f) throw std::invalid_argument("feature store index not found in " + dir.string());
    const auto entries = store_index_from_json(json::parse(f));
    std::set<std::string> labels;
    for (const auto& e : entries) labels.insert(e.label);
    chirp::FeatureDataset ds;
    std::map<std::string, std::size_t> index;
    for (const auto& l : labels) {
        index[l] = ds.class_names.size();
        ds.class_names.push_back(l);
    }
    for (const auto& e : entries) {
        chirp::FeatureDataset::Item item;
        item.id = e.path;
        item.label = index.at(e.label);
        item.features.values = chirp::container::load(dir / e.file).get("mfcc");
        if (e.split == "train")
            ds.train.push_back(std::move(item));
        else if (e.split == "val")
            ds.val.push_back(std::move(item));
        else
            ds.test.push_back(std::move(item));
    }
    return ds;
}

std::vector<const chirp::TrainingExample*> split_examples(const chirp::VariantData& data,
                                                          const std::string& name) {
    const std::vector<chirp::TrainingExample>* src = nullptr;
    if (name == "train") src = &data.train;
    else if (name == "val") src = &data.val;
    else if (name == "test") src = &data.test;
    else throw std::invalid_argument("unknown split: " + name);
    std::vector<const chirp::TrainingExample*> out;
    for (const auto& ex : *src) out.push_back(&ex);
    return out;
}

void write_metrics_csv(std::ostream& os, const std::string& variant,
                       const chirp::MetricsReport& r) {
    os << variant << "," << r.macro_precision << "," << r.macro_recall << ","
       << r.accuracy << "\n";
}

// ---- subcommands ------------------------------------------------------------

int cmd_ingest(const std::string& root, const std::string& out_dir,
               const chirp::RunConfig& cfg) {
    const chirp::DatasetManifest manifest = chirp::filter_min_samples(
        chirp::normalize_labels(chirp::build_manifest(root)), cfg.min_samples);
    const chirp::SplitAssignment split =
        chirp::split_dataset(manifest, cfg.split_ratios, cfg.seed);

    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "manifest.json")
        << chirp::manifest_to_json(manifest).dump(2) << "\n";
    std::ofstream(fs::path(out_dir) / "splits.json")
        << chirp::split_to_json(split).dump(2) << "\n";
    write_run_manifest(out_dir, cfg, {});

    std::cout << "classes: " << manifest.class_counts.size() << "\n";
    std::cout << "clips: " << manifest.entries.size() << "\n";
    for (const auto& [label, count] : manifest.class_counts)
        std::cout << "  " << label << ": " << count << "\n";
    std::cout << "split sizes: train=" << split.train.size() << " val=" << split.val.size()
              << " test=" << split.test.size() << "\n";
    if (manifest.skipped_non_audio > 0)
        std::cout << "skipped non-audio files: " << manifest.skipped_non_audio << "\n";
    return 0;
}

int cmd_extract(const std::string& splits_path, const std::string& out_dir,
                const chirp::RunConfig& cfg, unsigned jobs) {
    std::ifstream sf(splits_path);
    if (!sf) throw std::invalid_argument("cannot open splits file: " + splits_path);
    const chirp::SplitAssignment split = chirp::split_from_json(json::parse(sf));
    fs::create_directories(out_dir);

    const std::uint64_t config_hash = chirp::fnv1a(json(cfg.mfcc).dump());
    std::map<std::string, StoreEntry> existing;
    if (fs::exists(fs::path(out_dir) / "index.json")) {
        std::ifstream f(fs::path(out_dir) / "index.json");
        for (auto& e : store_index_from_json(json::parse(f))) existing[e.path] = e;
    }

    struct Task {
        chirp::ManifestEntry entry;
        std::string split_name;
        std::size_t index;
    };
    std::vector<Task> tasks;
    for (const auto& [part, name] :
         {std::pair{&split.train, "train"}, {&split.val, "val"}, {&split.test, "test"}})
        for (const auto& e : *part) tasks.push_back({e, name, tasks.size()});

    std::vector<StoreEntry> entries(tasks.size());
    std::vector<std::string> failures;
    std::atomic<std::size_t> next{0}, skipped{0};
    std::mutex mu;

    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
            const Task& task = tasks[i];
            try {
                const std::uint64_t source_hash = chirp::hash_file(task.entry.path);
                const std::string file = "feat_" + std::to_string(task.index) + ".bin";
                auto it = existing.find(task.entry.path);
                if (it != existing.end() && it->second.source_hash == source_hash &&
                    it->second.config_hash == config_hash &&
                    fs::exists(fs::path(out_dir) / it->second.file)) {
                    entries[task.index] = it->second;
                    entries[task.index].split = task.split_name;
                    ++skipped;
                    continue;
                }
                const chirp::AudioClip clip = chirp::load_wav(task.entry.path);
                const chirp::FeatureMatrix m = chirp::extract_mfcc(clip, cfg.mfcc);
                chirp::container::Archive a;
                a.meta = {{"path", task.entry.path}, {"label", task.entry.label}};
                a.add("mfcc", m.values);
                chirp::container::save(a, fs::path(out_dir) / file);
                entries[task.index] = {file,        task.entry.path, task.entry.label,
                                       task.split_name, source_hash,     config_hash};
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                failures.push_back(task.entry.path + ": " + e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n_workers = std::max(1u, jobs);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<StoreEntry> ok;
    for (auto& e : entries)
        if (!e.file.empty()) ok.push_back(std::move(e));
    std::ofstream(fs::path(out_dir) / "index.json") << store_index_to_json(ok).dump(2) << "\n";
    write_run_manifest(out_dir, cfg, {splits_path});

    std::cout << "extracted: " << ok.size() - skipped << "\n";
    std::cout << "skipped: " << skipped << "\n";
    if (!failures.empty()) {
        std::cout << "failures: " << failures.size() << "\n";
        for (const auto& f : failures) std::cerr << "  " << f << "\n";
        return 1;
    }
    return 0;
}

int cmd_train(const std::string& variant_name, const std::string& features_dir,
              const std::string& out_dir, const chirp::RunConfig& cfg) {
    const chirp::ModelVariant variant = chirp::variant_from_string(variant_name);
    const chirp::FeatureDataset ds = load_feature_store(features_dir);
    const chirp::VariantData data = chirp::build_variant_data(ds, variant, cfg);
    const chirp::ClassifierConfig cc =
        chirp::variant_classifier_config(cfg, variant, ds.classes());
    const chirp::TrainResult result = chirp::train_classifier(data.train, data.val, cc);

    fs::create_directories(out_dir);
    chirp::container::Archive a = chirp::model_to_archive(result.model, cc, variant_name);
    a.meta["best_epoch"] = result.best_epoch;
    a.meta["run_config"] = cfg;
    a.meta["class_names"] = ds.class_names;
    chirp::container::save(a, fs::path(out_dir) / "checkpoint.bin");
    if (data.autoencoder)
        chirp::container::save(
            chirp::autoencoder_to_archive(*data.autoencoder, cfg.autoencoder),
            fs::path(out_dir) / "autoencoder.bin");

    std::ofstream log(fs::path(out_dir) / "training_log.csv");
    log << "epoch,train_loss,val_loss,val_acc,lr\n";
    for (std::size_t i = 0; i < result.log.size(); ++i)
        log << i << "," << result.log[i].train_loss << "," << result.log[i].val_loss << ","
            << result.log[i].val_accuracy << "," << result.log[i].learning_rate << "\n";
    write_run_manifest(out_dir, cfg, {fs::path(features_dir) / "index.json"});

    const auto& best = result.log[result.best_epoch];
    std::cout << "variant: " << variant_name << "\n";
    std::cout << "best epoch: " << result.best_epoch << "\n";
    std::cout << "val loss: " << best.val_loss << "\n";
    std::cout << "val accuracy: " << best.val_accuracy << "\n";
    return 0;
}

// Rebuild variant inputs for an existing checkpoint, reusing its stored
// run config and, for MDRR, the saved autoencoder.
chirp::VariantData rebuild_inputs(const chirp::container::Archive& ckpt,
                                  const fs::path& ckpt_dir, const chirp::FeatureDataset& ds,
                                  chirp::ModelVariant variant, chirp::RunConfig cfg) {
    if (variant != chirp::ModelVariant::MDRR) return chirp::build_variant_data(ds, variant, cfg);
    const fs::path ae_path = ckpt_dir / "autoencoder.bin";
    if (!fs::exists(ae_path))
        throw std::invalid_argument("autoencoder.bin missing next to the checkpoint");
    const chirp::AutoencoderParams ae =
        chirp::autoencoder_from_archive(chirp::container::load(ae_path));
    chirp::VariantData out;
    out.autoencoder = ae;
    auto capped = [&](const chirp::FeatureDataset::Item& it) {
        const chirp::CappedVector cv = chirp::rearrange_pipeline(it.features, cfg.rearrange);
        return Eigen::Map<const Eigen::VectorXd>(cv.values.data(),
                                                 static_cast<Eigen::Index>(cv.values.size()))
            .eval();
    };
    auto fill = [&](const std::vector<chirp::FeatureDataset::Item>& items,
                    std::vector<chirp::TrainingExample>& dst) {
        for (const auto& it : items)
            dst.push_back({chirp::prepare_input_flat(chirp::encode(ae, capped(it)),
                                                     cfg.mdrr_shape.seq_len,
                                                     cfg.mdrr_shape.features),
                           it.label});
    };
    fill(ds.train, out.train);
    fill(ds.val, out.val);
    fill(ds.test, out.test);
    if (cfg.standardize_inputs) chirp::standardize_variant_data(out);
    (void)ckpt;
    return out;
}

int cmd_eval(const std::string& checkpoint, const std::string& features_dir,
             const std::string& split_name, const std::string& out_dir) {
    if (!fs::exists(checkpoint))
        throw std::invalid_argument("checkpoint not found: " + checkpoint);
    const chirp::container::Archive a = chirp::container::load(checkpoint);
    const chirp::BiLstmAttentionModel model = chirp::model_from_archive(a);
    const chirp::ModelVariant variant =
        chirp::variant_from_string(a.meta.at("model_variant").get<std::string>());
    const chirp::RunConfig cfg = a.meta.at("run_config").get<chirp::RunConfig>();
    const chirp::FeatureDataset ds = load_feature_store(features_dir);

    const chirp::VariantData data =
        rebuild_inputs(a, fs::path(checkpoint).parent_path(), ds, variant, cfg);
    std::vector<std::size_t> truth, pred;
    for (const auto* ex : split_examples(data, split_name)) {
        truth.push_back(ex->label);
        pred.push_back(chirp::predict(model, ex->input));
    }
    const chirp::MetricsReport r = chirp::metrics(chirp::confusion(truth, pred, ds.classes()));
    std::cout << "split: " << split_name << "\n";
    std::cout << "precision: " << r.macro_precision << "\n";
    std::cout << "recall: " << r.macro_recall << "\n";
    std::cout << "accuracy: " << r.accuracy << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream csv(fs::path(out_dir) / "metrics.csv");
        csv << "variant,precision,recall,accuracy\n";
        write_metrics_csv(csv, chirp::to_string(variant), r);
    }
    return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& features_dir,
              const std::string& out_dir, const chirp::RunConfig& cfg) {
    std::ifstream f(spec_path);
    if (!f) throw std::invalid_argument("cannot open sweep spec: " + spec_path);
    const chirp::SweepSpec spec = json::parse(f).get<chirp::SweepSpec>();
    const chirp::FeatureDataset ds = load_feature_store(features_dir);

    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "sweep.csv");
    csv << "parameter,value,seed,precision,recall,accuracy\n";
    chirp::run_sweep(spec, ds, cfg, [&](const chirp::SweepRow& row) {
        if (row.skipped) {
            std::cerr << "skipped " << spec.parameter << "=" << row.value
                      << " seed=" << row.seed << ": " << row.skip_reason << "\n";
            return;
        }
        csv << spec.parameter << "," << row.value << "," << row.seed << ","
            << row.report.macro_precision << "," << row.report.macro_recall << ","
            << row.report.accuracy << "\n";
        csv.flush();
        std::cout << spec.parameter << "=" << row.value << " seed=" << row.seed
                  << " accuracy=" << row.report.accuracy << "\n";
    });
    write_run_manifest(out_dir, cfg, {spec_path});
    return 0;
}

int cmd_ablation(const std::string& features_dir, const std::string& out_dir,
                 const chirp::RunConfig& cfg) {
    const chirp::FeatureDataset ds = load_feature_store(features_dir);
    const auto rows = chirp::run_ablation(ds, cfg);
    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "ablation.csv");
    csv << "variant,precision,recall,accuracy\n";
    int rc = 0;
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            std::cerr << row.variant << " failed: " << row.error << "\n";
            rc = 1;
            continue;
        }
        write_metrics_csv(csv, row.variant, row.report);
        std::cout << row.variant << ": precision=" << row.report.macro_precision
                  << " recall=" << row.report.macro_recall
                  << " accuracy=" << row.report.accuracy << "\n";
    }
    write_run_manifest(out_dir, cfg, {});
    return rc;
}

int cmd_cluster(const std::string& checkpoint, const std::string& features_dir,
                const std::string& split_name, const std::string& out_dir, bool per_clip) {
    if (!fs::exists(checkpoint))
        throw std::invalid_argument("checkpoint not found: " + checkpoint);
    const chirp::container::Archive a = chirp::container::load(checkpoint);
    const chirp::BiLstmAttentionModel model = chirp::model_from_archive(a);
    const chirp::ModelVariant variant =
        chirp::variant_from_string(a.meta.at("model_variant").get<std::string>());
    const chirp::RunConfig cfg = a.meta.at("run_config").get<chirp::RunConfig>();
    const chirp::FeatureDataset ds = load_feature_store(features_dir);
    const chirp::VariantData data =
        rebuild_inputs(a, fs::path(checkpoint).parent_path(), ds, variant, cfg);

    std::vector<chirp::TrainingExample> examples;
    std::vector<std::string> ids;
    const std::vector<chirp::FeatureDataset::Item>* items =
        split_name == "train" ? &ds.train : split_name == "val" ? &ds.val : &ds.test;
    for (const auto* ex : split_examples(data, split_name)) examples.push_back(*ex);
    for (const auto& it : *items) ids.push_back(it.id);

    const chirp::EmbeddingSet embeddings =
        chirp::extract_embeddings(model, examples, ds.class_names, ids);
    fs::create_directories(out_dir);
    chirp::export_embeddings(embeddings, fs::path(out_dir) / "embeddings.csv");

    const auto points = per_clip
                            ? [&] {
                                  std::vector<std::pair<std::string, Eigen::VectorXd>> pts;
                                  for (const auto& r : embeddings.rows)
                                      pts.emplace_back(r.label + ":" + r.id, r.vector);
                                  return pts;
                              }()
                            : chirp::class_means(embeddings);
    if (points.size() >= 2) {
        const chirp::Dendrogram tree = chirp::agglomerative(points);
        chirp::export_dendrogram(tree, fs::path(out_dir) / "dendrogram.json",
                                 fs::path(out_dir) / "dendrogram.nwk");
    } else {
        std::cerr << "fewer than 2 clusters; dendrogram skipped\n";
    }
    std::cout << "embeddings: " << embeddings.rows.size() << " rows\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"animal sound classification pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // allow --config/--seed/--out/--jobs after the subcommand

    std::string config_path, root, out = "out", splits, features, checkpoint, spec_path;
    std::string variant = "MDRR", split_name = "test";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    bool per_clip = false;

    app.add_option("--config", config_path, "JSON run configuration")->capture_default_str();
    app.add_option("--seed", seed, "override every stage seed");
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--jobs", jobs, "worker count")->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "build manifest and splits from a dataset root");
    ingest->add_option("--root", root, "dataset root, one subdirectory per label")->required();

    auto* extract = app.add_subcommand("extract", "extract MFCC features for a split file");
    extract->add_option("--splits", splits, "splits.json from ingest")->required();

    auto* train = app.add_subcommand("train", "train one variant (MD, MDR, MDRR)");
    train->add_option("--variant", variant, "MD | MDR | MDRR")->capture_default_str();
    train->add_option("--features", features, "feature store directory")->required();

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a split");
    eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint.bin")->required();
    eval_cmd->add_option("--features", features, "feature store directory")->required();
    eval_cmd->add_option("--split", split_name, "train | val | test")->capture_default_str();

    auto* ablation = app.add_subcommand("ablation", "train and compare MD, MDR, MDRR");
    ablation->add_option("--features", features, "feature store directory")->required();

    auto* sweep = app.add_subcommand("sweep", "parameter sweep over MDRR");
    sweep->add_option("--spec", spec_path, "sweep spec JSON")->required();
    sweep->add_option("--features", features, "feature store directory")->required();

    auto* cluster = app.add_subcommand("cluster", "export embeddings and dendrogram");
    cluster->add_option("--checkpoint", checkpoint, "checkpoint.bin")->required();
    cluster->add_option("--features", features, "feature store directory")->required();
    cluster->add_option("--split", split_name, "train | val | test")->capture_default_str();
    cluster->add_flag("--per-clip", per_clip, "cluster per clip instead of class means");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const chirp::RunConfig cfg = load_config(config_path, seed);
        if (ingest->parsed()) return cmd_ingest(root, out, cfg);
        if (extract->parsed()) return cmd_extract(splits, out, cfg, jobs);
        if (train->parsed()) return cmd_train(variant, features, out, cfg);
        if (eval_cmd->parsed()) return cmd_eval(checkpoint, features, split_name, out);
        if (ablation->parsed()) return cmd_ablation(features, out, cfg);
        if (sweep->parsed()) return cmd_sweep(spec_path, features, out, cfg);
        if (cluster->parsed())
            return cmd_cluster(checkpoint, features, split_name, out, per_clip);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        const std::string what = e.what();
        if (what.find("diverged") != std::string::npos ||
            what.find("non-finite") != std::string::npos)
            return kExitNumeric;
        return kExitUsage;
    }
    return 0;
}
