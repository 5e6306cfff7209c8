// agetrace: simulate sensor aging, detect defects, train/apply age
// estimators, order images by device fingerprint drift, and audit
// classifiers for content bias.
//
// Exit codes: 0 success, 2 usage/validation, 3 I/O, 4 internal error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "agetrace/bias_audit.hpp"
#include "agetrace/dataset.hpp"
#include "agetrace/defect_detect.hpp"
#include "agetrace/demosaic.hpp"
#include "agetrace/filters.hpp"
#include "agetrace/image_io.hpp"
#include "agetrace/knn_pixelwise.hpp"
#include "agetrace/ml_age.hpp"
#include "agetrace/model_io.hpp"
#include "agetrace/naive_bayes.hpp"
#include "agetrace/prnu.hpp"
#include "agetrace/stats.hpp"
#include "agetrace/version.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace agetrace;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

ordered_json report_header(const std::string& command, std::uint64_t seed,
                           ordered_json config) {
    ordered_json j;
    j["schema_version"] = 1;
    j["toolkit_version"] = kToolkitVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = std::move(config);
    return j;
}

void write_report(const ordered_json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << j.dump(2) << '\n';
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Mosaic-domain defect site -> the output-image plane it lands on.
PixelCoord to_scene_coord(const PixelCoord& site) {
    return {site.row, site.col, bayer_channel(site.row, site.col)};
}

struct ManifestData {
    DatasetManifest manifest;
    std::string base_dir;
};

ManifestData open_manifest(const std::string& path) {
    ManifestData md;
    md.manifest = load_manifest(path);
    md.base_dir = fs::path(path).parent_path().string();
    if (md.base_dir.empty()) md.base_dir = ".";
    return md;
}

std::vector<PixelCoord> detect_from_manifest(const ManifestData& md, double threshold) {
    std::vector<RasterImage> dfis;
    for (const auto& rec : md.manifest.records)
        if (rec.meta.kind == FrameKind::DarkField)
            dfis.push_back(read_image((fs::path(md.base_dir) / rec.path).string()));
    if (dfis.empty())
        throw std::invalid_argument("manifest contains no dark-field frames to detect from");
    return detect_defects_dfi(dfis, threshold);
}

// Scene frames with metadata, in manifest (chronological) order.
std::vector<LabeledSample> scene_samples(const ManifestData& md) {
    auto samples = load_labeled_samples(md.manifest, md.base_dir, FrameKind::Scene);
    if (samples.empty()) throw std::invalid_argument("manifest contains no scene frames");
    return samples;
}

void require_class_labels(const ManifestData& md) {
    for (const auto& rec : md.manifest.records)
        if (rec.meta.kind == FrameKind::Scene && !rec.class_label)
            throw std::invalid_argument("training requires class labels on all scene frames");
}

std::vector<double> residual_features(const RasterImage& img,
                                      const std::vector<PixelCoord>& coords, int kernel) {
    std::vector<double> f;
    f.reserve(coords.size());
    for (const auto& c : coords)
        f.push_back(residual_at(img, c.row, c.col, c.channel, kernel).value);
    return f;
}

// ----------------------------------------------------------- simulate --

int run_simulate(const std::string& spec_path, const std::string& out_dir) {
    const DatasetSpec spec = dataset_spec_from_json_text(read_text_file(spec_path));
    const auto result = synthesize_dataset(spec, out_dir);
    std::cout << "wrote " << result.manifest.records.size() << " frames, "
              << result.truth.defects.size() << " defects -> " << out_dir << '\n';
    return 0;
}

// ------------------------------------------------------------- detect --

int run_detect(const std::string& manifest_path, const std::string& out_path,
               double threshold, int kernel, bool estimate_onsets, bool uniformity) {
    const auto md = open_manifest(manifest_path);
    const auto coords = detect_from_manifest(md, threshold);

    ordered_json config{{"manifest", manifest_path},
                        {"threshold", threshold},
                        {"kernel", kernel},
                        {"estimate_onsets", estimate_onsets},
                        {"uniformity", uniformity}};
    ordered_json j = report_header("detect", 0, config);
    j["defect_count"] = coords.size();
    j["coords"] = ordered_json::array();
    for (const auto& c : coords)
        j["coords"].push_back(ordered_json{{"row", c.row}, {"col", c.col}});

    if (estimate_onsets && !coords.empty()) {
        const auto scenes = scene_samples(md);
        std::vector<RasterImage> images;
        std::vector<AcquisitionMeta> metas;
        for (const auto& s : scenes) {
            images.push_back(s.image);
            metas.push_back(s.meta);
        }
        std::vector<PixelCoord> scene_coords;
        for (const auto& c : coords) scene_coords.push_back(to_scene_coord(c));
        const auto series = extract_residual_series(images, metas, scene_coords, kernel);
        j["estimates"] = ordered_json::array();
        for (const auto& s : series) {
            const auto est = estimate_onset_and_params(s);
            ordered_json ej;
            ej["coord"] = ordered_json{{"row", est.coord.row},
                                       {"col", est.coord.col},
                                       {"channel", est.coord.channel}};
            ej["onset_index_j"] = est.onset_index_j;
            ej["after"] = ordered_json{{"K", est.after.K},
                                       {"D", est.after.D},
                                       {"c", est.after.c},
                                       {"sigma", est.after.sigma},
                                       {"dropped", est.after.dropped}};
            ej["before_sigma"] = est.before.sigma;
            j["estimates"].push_back(std::move(ej));
        }
    }

    if (uniformity && coords.size() >= 2) {
        int width = 0, height = 0;
        for (const auto& rec : md.manifest.records)
            if (rec.meta.kind == FrameKind::DarkField) {
                const auto img = read_image((fs::path(md.base_dir) / rec.path).string());
                width = img.width;
                height = img.height;
                break;
            }
        const auto rep = inter_defect_distance_histogram(coords, width, height);
        j["uniformity"] = ordered_json{{"statistic", rep.statistic},
                                       {"p_value", rep.p_value},
                                       {"status", rep.status},
                                       {"bins", rep.bins}};
    }

    write_report(j, out_path);
    std::cout << "flagged " << coords.size() << " sites -> " << out_path << '\n';
    return 0;
}

// -------------------------------------------------------------- train --

int run_train(const std::string& manifest_path, const std::string& estimator,
              const std::string& out_path, double threshold, int kernel,
              std::optional<std::uint64_t> seed, int block_size, int n_blocks, int k_select,
              int k_neighbors, int val_stride) {
    const auto md = open_manifest(manifest_path);

    if (estimator == "ml" || estimator == "nb-ne" || estimator == "nb-he" ||
        estimator == "nb-kde") {
        const auto sites = detect_from_manifest(md, threshold);
        if (sites.empty())
            throw std::invalid_argument("no defective sites detected; nothing to model");
        std::vector<PixelCoord> coords;
        for (const auto& s : sites) coords.push_back(to_scene_coord(s));

        const auto scenes = scene_samples(md);
        if (estimator == "ml") {
            std::vector<RasterImage> images;
            std::vector<AcquisitionMeta> metas;
            for (const auto& s : scenes) {
                images.push_back(s.image);
                metas.push_back(s.meta);
            }
            const auto series = extract_residual_series(images, metas, coords, kernel);
            LikelihoodAgeModel model;
            model.trusted_len = static_cast<int>(scenes.size());
            for (const auto& s : series)
                model.defects.push_back(estimate_onset_and_params(s));
            for (const auto& s : scenes) {
                model.trusted_timestamps.push_back(s.meta.timestamp);
                model.trusted_labels.push_back(s.label);
            }
            save_model(model, out_path);
        } else {
            require_class_labels(md);
            std::vector<std::vector<double>> features;
            std::vector<int> labels;
            for (const auto& s : scenes) {
                features.push_back(residual_features(s.image, coords, kernel));
                labels.push_back(s.label);
            }
            const NbVariant variant = nb_variant_from_string(estimator.substr(3));
            save_model(nb_train(variant, features, labels, coords), out_path);
        }
    } else if (estimator == "knn") {
        if (!seed)
            throw std::invalid_argument("--seed is required for the knn estimator "
                                        "(block placement is randomized)");
        require_class_labels(md);
        const auto scenes = scene_samples(md);

        // Deterministic interleaved validation split per class.
        std::map<int, int> counter;
        std::vector<LabeledSample> train, validation;
        for (const auto& s : scenes) {
            const int i = counter[s.label]++;
            if (i % val_stride == val_stride - 1)
                validation.push_back(s);
            else
                train.push_back(s);
        }
        if (validation.empty())
            throw std::invalid_argument("validation split is empty; lower --val-stride");

        KnnTrainConfig cfg;
        cfg.block_size = block_size;
        cfg.n_blocks = n_blocks;
        cfg.k_select = k_select;
        cfg.k_neighbors = k_neighbors;
        cfg.seed = *seed;
        save_model(pixelwise_knn_train(train, validation, cfg), out_path);
    } else {
        throw std::invalid_argument("unknown estimator: " + estimator);
    }

    std::cout << "trained " << estimator << " -> " << out_path << '\n';
    return 0;
}

// -------------------------------------------------------- approximate --

int run_approximate(const std::string& manifest_path, const std::string& model_path,
                    const std::string& out_path, int kernel) {
    const auto md = open_manifest(manifest_path);
    const auto queries = scene_samples(md);
    const std::string kind = model_kind(model_path);

    ordered_json config{{"manifest", manifest_path}, {"model", model_path}, {"kernel", kernel}};
    ordered_json j = report_header("approximate", 0, config);
    j["model_kind"] = kind;
    j["results"] = ordered_json::array();

    if (kind == "ml-age") {
        const auto model = load_ml_model(model_path);
        std::vector<double> predicted, truth;
        bool has_truth = !model.trusted_timestamps.empty();
        std::size_t qi = 0;
        for (const auto& q : queries) {
            const auto approx = ml_approximate_age(model, q.image, q.meta, kernel);
            ordered_json rj;
            rj["query_index"] = qi;
            rj["predicted_index"] = approx.index;
            if (has_truth) {
                // Truth convention: first trusted index not earlier than the query.
                const auto it = std::lower_bound(model.trusted_timestamps.begin(),
                                                 model.trusted_timestamps.end(),
                                                 q.meta.timestamp);
                const int tj = static_cast<int>(it - model.trusted_timestamps.begin());
                rj["truth_index"] = tj;
                predicted.push_back(approx.index);
                truth.push_back(tj);
            }
            j["results"].push_back(std::move(rj));
            ++qi;
        }
        if (has_truth && !predicted.empty()) {
            const double m = mae(predicted, truth);
            ordered_json metrics{{"mae", m}};
            // Interior onsets define the mean spacing for the relative error.
            std::vector<double> onsets;
            for (const auto& d : model.defects)
                if (d.onset_index_j > 0 && d.onset_index_j < model.trusted_len)
                    onsets.push_back(d.onset_index_j);
            std::sort(onsets.begin(), onsets.end());
            onsets.erase(std::unique(onsets.begin(), onsets.end()), onsets.end());
            if (onsets.size() >= 2)
                metrics["relative_estimation_error"] = relative_estimation_error(m, onsets);
            j["metrics"] = std::move(metrics);
        }
    } else if (kind == "naive-bayes") {
        const auto model = load_nb_model(model_path);
        if (model.defect_coords.empty())
            throw std::invalid_argument("model lacks defect coordinates; cannot featurize images");
        std::vector<int> pred, truth;
        bool all_labeled = true;
        std::size_t qi = 0;
        for (const auto& q : queries) {
            const auto p = nb_classify(model, residual_features(q.image, model.defect_coords, kernel));
            ordered_json rj{{"query_index", qi}, {"predicted_class", p.label}};
            rj["posterior"] = p.posterior;
            pred.push_back(p.label);
            truth.push_back(q.label);
            j["results"].push_back(std::move(rj));
            ++qi;
        }
        (void)all_labeled;
        const auto rep = classification_report(pred, truth);
        ordered_json metrics{{"accuracy", rep.accuracy}, {"macro_f1", rep.macro_f1}};
        j["metrics"] = std::move(metrics);
    } else if (kind == "pixelwise-knn") {
        const auto model = load_knn_model(model_path);
        std::vector<int> pred, truth;
        std::size_t qi = 0;
        for (const auto& q : queries) {
            const auto p = pixelwise_knn_classify(model, q.image);
            ordered_json rj{{"query_index", qi}, {"predicted_class", p.label}};
            rj["block_votes"] = p.block_votes;
            pred.push_back(p.label);
            truth.push_back(q.label);
            j["results"].push_back(std::move(rj));
            ++qi;
        }
        const auto rep = classification_report(pred, truth);
        j["metrics"] = ordered_json{{"accuracy", rep.accuracy}, {"macro_f1", rep.macro_f1}};
    } else {
        throw std::invalid_argument("unrecognized model kind: " + kind);
    }

    write_report(j, out_path);
    std::cout << "approximated " << queries.size() << " queries -> " << out_path << '\n';
    return 0;
}

// -------------------------------------------------------------- order --

int run_order(const std::string& manifest_path, const std::string& out_path, int kernel,
              const std::vector<std::string>& query_paths) {
    const auto md = open_manifest(manifest_path);
    const auto scenes = scene_samples(md);

    std::map<int, std::vector<const LabeledSample*>> by_session;
    std::map<int, double> session_time;
    {
        std::size_t idx = 0;
        for (const auto& rec : md.manifest.records) {
            if (rec.meta.kind != FrameKind::Scene) continue;
            by_session[rec.session_index].push_back(&scenes[idx]);
            session_time[rec.session_index] = rec.meta.timestamp;
            ++idx;
        }
    }
    if (by_session.size() < 3)
        throw std::invalid_argument("ordering needs at least 3 sessions");

    std::vector<PrnuField> fields;
    ordered_json clusters = ordered_json::array();
    for (const auto& [session, members] : by_session) {
        std::vector<RasterImage> images;
        for (const auto* s : members) images.push_back(s->image);
        fields.push_back(prnu_estimate(images, kernel, session_time[session]));
        clusters.push_back(ordered_json{{"session", session},
                                        {"time", session_time[session]},
                                        {"n_images", members.size()}});
    }

    const auto result = mi_order(fields);

    ordered_json config{{"manifest", manifest_path}, {"kernel", kernel}};
    ordered_json j = report_header("order", 0, config);
    j["clusters"] = std::move(clusters);
    j["order"] = result.order;
    j["score"] = result.score;
    j["tie"] = result.tie;
    j["correlation"] = result.correlation;

    if (!query_paths.empty()) {
        std::vector<PrnuField> ordered_fields;
        for (int i : result.order) ordered_fields.push_back(fields[i]);
        j["query_placements"] = ordered_json::array();
        for (const auto& qp : query_paths) {
            const int place = iip_place(read_image(qp), ordered_fields, kernel);
            j["query_placements"].push_back(
                ordered_json{{"query", qp}, {"position", place}});
        }
    }

    write_report(j, out_path);
    std::cout << "ordered " << fields.size() << " clusters -> " << out_path << '\n';
    return 0;
}

// ----------------------------------------------------------- diagnose --

Classifier make_classifier(const std::string& model_path, int kernel) {
    const std::string kind = model_kind(model_path);
    if (kind == "ml-age") {
        auto model = std::make_shared<LikelihoodAgeModel>(load_ml_model(model_path));
        if (model->trusted_labels.empty())
            throw std::invalid_argument("ml model lacks trusted labels; cannot predict classes");
        return [model, kernel](const RasterImage& img, const AcquisitionMeta& meta) {
            const auto approx = ml_approximate_age(*model, img, meta, kernel);
            const int idx = std::min(approx.index, model->trusted_len - 1);
            return model->trusted_labels[idx];
        };
    }
    if (kind == "naive-bayes") {
        auto model = std::make_shared<NBModel>(load_nb_model(model_path));
        if (model->defect_coords.empty())
            throw std::invalid_argument("nb model lacks defect coordinates");
        return [model, kernel](const RasterImage& img, const AcquisitionMeta&) {
            return nb_classify(*model, residual_features(img, model->defect_coords, kernel)).label;
        };
    }
    if (kind == "pixelwise-knn") {
        auto model = std::make_shared<PixelwiseKnnModel>(load_knn_model(model_path));
        return [model](const RasterImage& img, const AcquisitionMeta&) {
            return pixelwise_knn_classify(*model, img).label;
        };
    }
    throw std::invalid_argument("unrecognized model kind: " + kind);
}

int run_diagnose(const std::string& manifest_path, const std::string& model_path,
                 const std::string& out_path, int kernel, double subsample, int n_sets,
                 std::uint64_t seed, int holdout_stride, const std::string& mask_path) {
    const auto md = open_manifest(manifest_path);
    require_class_labels(md);
    const auto samples = scene_samples(md);

    // Interleaved holdout: every holdout_stride-th sample per class becomes a
    // held-out original; the rest feed the average images.
    std::map<int, int> counter;
    std::vector<LabeledSample> holdout, averaged;
    for (const auto& s : samples) {
        const int i = counter[s.label]++;
        if (i % holdout_stride == holdout_stride - 1)
            holdout.push_back(s);
        else
            averaged.push_back(s);
    }
    if (holdout.empty() || averaged.empty())
        throw std::invalid_argument("holdout split degenerate; adjust --holdout-stride");

    const auto classifier = make_classifier(model_path, kernel);
    const auto sets = average_images(averaged, subsample, n_sets, seed);
    const auto table = evaluate_input_suite(classifier, sets, holdout);
    const VerdictThresholds thresholds;
    const auto verdict = bias_verdict(table, thresholds);

    ordered_json config{{"manifest", manifest_path}, {"model", model_path},
                        {"kernel", kernel},         {"subsample_fraction", subsample},
                        {"n_sets", n_sets},         {"holdout_stride", holdout_stride}};
    if (!mask_path.empty()) config["mask"] = mask_path;
    ordered_json j = report_header("diagnose", seed, config);
    j["accuracies"] = ordered_json{{"S", table.acc_original},
                                   {"mean", table.acc_mean},
                                   {"constant", table.acc_constant},
                                   {"structure", table.acc_structure},
                                   {"filtered", table.acc_filtered}};
    j["chance"] = table.chance;
    j["failures"] = table.failures;
    j["thresholds"] = ordered_json{{"delta1", thresholds.delta1},
                                   {"delta2", thresholds.delta2},
                                   {"delta3", thresholds.delta3}};
    j["verdict"] = to_string(verdict);

    if (!mask_path.empty()) {
        const auto mask = read_image(mask_path);
        const auto ma = mask_evaluate(classifier, mask, holdout);
        j["masked"] = ordered_json{{"masked_accuracy", ma.masked},
                                   {"unmasked_accuracy", ma.unmasked},
                                   {"failures", ma.failures}};
    }

    write_report(j, out_path);
    std::cout << "verdict: " << to_string(verdict) << " -> " << out_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal image forensics toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    // simulate
    std::string sim_spec, sim_out;
    auto* sim = app.add_subcommand("simulate", "render a synthetic temporal dataset");
    sim->add_option("--spec", sim_spec, "dataset spec JSON file")->required();
    sim->add_option("--out", sim_out, "output directory")->required();

    // detect
    std::string det_manifest, det_out;
    double det_threshold = 14.0;
    int det_kernel = 3;
    bool det_onsets = false, det_uniformity = false;
    auto* det = app.add_subcommand("detect", "locate defective sites from dark fields");
    det->add_option("--manifest", det_manifest, "dataset manifest (JSON lines)")->required();
    det->add_option("--out", det_out, "report path")->required();
    det->add_option("--threshold", det_threshold, "dark-field mean threshold")
        ->check(CLI::PositiveNumber);
    det->add_option("--kernel", det_kernel, "median kernel (3 or 5)")->check(CLI::IsMember({3, 5}));
    det->add_flag("--estimate-onsets", det_onsets, "fit onset/params from scene frames");
    det->add_flag("--uniformity", det_uniformity, "report the spatial uniformity test");

    // train
    std::string tr_manifest, tr_estimator, tr_out;
    double tr_threshold = 14.0;
    int tr_kernel = 3;
    std::optional<std::uint64_t> tr_seed;
    int tr_block_size = 200, tr_blocks = 45, tr_k_select = 100, tr_k_neighbors = 5,
        tr_val_stride = 4;
    auto* tr = app.add_subcommand("train", "fit an age estimator on a trusted set");
    tr->add_option("--manifest", tr_manifest, "dataset manifest")->required();
    tr->add_option("--estimator", tr_estimator, "ml | nb-ne | nb-he | nb-kde | knn")->required();
    tr->add_option("--out", tr_out, "model path")->required();
    tr->add_option("--threshold", tr_threshold, "dark-field mean threshold");
    tr->add_option("--kernel", tr_kernel, "median kernel")->check(CLI::IsMember({3, 5}));
    tr->add_option("--seed", tr_seed, "rng seed (required for knn)");
    tr->add_option("--block-size", tr_block_size, "knn block size")->check(CLI::PositiveNumber);
    tr->add_option("--blocks", tr_blocks, "knn block count")->check(CLI::PositiveNumber);
    tr->add_option("--k-select", tr_k_select, "classifiers kept per block")
        ->check(CLI::PositiveNumber);
    tr->add_option("--k-neighbors", tr_k_neighbors, "neighbor count")->check(CLI::PositiveNumber);
    tr->add_option("--val-stride", tr_val_stride, "every n-th sample per class validates")
        ->check(CLI::Range(2, 1000));

    // approximate
    std::string ap_manifest, ap_model, ap_out;
    int ap_kernel = 3;
    auto* ap = app.add_subcommand("approximate", "apply a trained estimator to queries");
    ap->add_option("--manifest", ap_manifest, "query manifest")->required();
    ap->add_option("--model", ap_model, "trained model path")->required();
    ap->add_option("--out", ap_out, "report path")->required();
    ap->add_option("--kernel", ap_kernel, "median kernel")->check(CLI::IsMember({3, 5}));

    // order
    std::string or_manifest, or_out;
    int or_kernel = 3;
    std::vector<std::string> or_queries;
    auto* orc = app.add_subcommand("order", "order session clusters by fingerprint drift");
    orc->add_option("--manifest", or_manifest, "dataset manifest")->required();
    orc->add_option("--out", or_out, "report path")->required();
    orc->add_option("--kernel", or_kernel, "median kernel")->check(CLI::IsMember({3, 5}));
    orc->add_option("--query", or_queries, "image(s) to place within the ordered clusters");

    // diagnose
    std::string dg_manifest, dg_model, dg_out, dg_mask;
    int dg_kernel = 3, dg_sets = 20, dg_holdout = 5;
    double dg_subsample = 0.8;
    std::uint64_t dg_seed = 0;
    auto* dg = app.add_subcommand("diagnose", "audit a classifier for content bias");
    dg->add_option("--manifest", dg_manifest, "labeled dataset manifest")->required();
    dg->add_option("--model", dg_model, "trained model path")->required();
    dg->add_option("--out", dg_out, "report path")->required();
    dg->add_option("--kernel", dg_kernel, "median kernel")->check(CLI::IsMember({3, 5}));
    dg->add_option("--subsample", dg_subsample, "subsample fraction per average set")
        ->check(CLI::Range(0.01, 1.0));
    dg->add_option("--sets", dg_sets, "number of average-image sets")->check(CLI::PositiveNumber);
    dg->add_option("--seed", dg_seed, "rng seed for subsampling")->required();
    dg->add_option("--holdout-stride", dg_holdout, "every n-th sample per class is held out")
        ->check(CLI::Range(2, 1000));
    dg->add_option("--mask", dg_mask, "binary mask image for masked-input evaluation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*sim) return run_simulate(sim_spec, sim_out);
        if (*det)
            return run_detect(det_manifest, det_out, det_threshold, det_kernel, det_onsets,
                              det_uniformity);
        if (*tr)
            return run_train(tr_manifest, tr_estimator, tr_out, tr_threshold, tr_kernel, tr_seed,
                             tr_block_size, tr_blocks, tr_k_select, tr_k_neighbors, tr_val_stride);
        if (*ap) return run_approximate(ap_manifest, ap_model, ap_out, ap_kernel);
        if (*orc) return run_order(or_manifest, or_out, or_kernel, or_queries);
        if (*dg)
            return run_diagnose(dg_manifest, dg_model, dg_out, dg_kernel, dg_subsample, dg_sets,
                                dg_seed, dg_holdout, dg_mask);
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return 0;
}
