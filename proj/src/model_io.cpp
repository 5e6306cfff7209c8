#include "agetrace/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

using ordered_json = nlohmann::ordered_json;

namespace agetrace {
namespace {

void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model: " + path);
    out << j.dump(2) << '\n';
}

ordered_json read_json(const std::string& path, const std::string& expected_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read model: " + path);
    ordered_json j;
    in >> j;
    if (j.value("schema_version", -1) != kModelSchemaVersion)
        throw std::runtime_error("unrecognized model schema version in " + path);
    if (j.value("kind", std::string{}) != expected_kind)
        throw std::runtime_error("model kind mismatch in " + path + ": expected " +
                                 expected_kind + ", found " + j.value("kind", std::string{}));
    return j;
}

ordered_json coord_to_json(const PixelCoord& c) {
    return ordered_json{{"row", c.row}, {"col", c.col}, {"channel", c.channel}};
}

PixelCoord coord_from_json(const ordered_json& j) {
    return {j.at("row").get<int>(), j.at("col").get<int>(), j.value("channel", 0)};
}

ordered_json side_to_json(const SideFit& s) {
    ordered_json j{{"K", s.K}, {"D", s.D}, {"c", s.c}, {"sigma", s.sigma}};
    j["dropped"] = s.dropped;
    return j;
}

SideFit side_from_json(const ordered_json& j) {
    SideFit s;
    s.K = j.at("K").get<double>();
    s.D = j.at("D").get<double>();
    s.c = j.at("c").get<double>();
    s.sigma = j.at("sigma").get<double>();
    s.dropped = j.value("dropped", std::vector<std::string>{});
    return s;
}

} // namespace

void save_model(const LikelihoodAgeModel& model, const std::string& path) {
    model.validate();
    ordered_json j;
    j["schema_version"] = kModelSchemaVersion;
    j["kind"] = "ml-age";
    j["trusted_len"] = model.trusted_len;
    j["trusted_timestamps"] = model.trusted_timestamps;
    j["trusted_labels"] = model.trusted_labels;
    j["defects"] = ordered_json::array();
    for (const auto& d : model.defects) {
        ordered_json dj;
        dj["coord"] = coord_to_json(d.coord);
        dj["onset_index_j"] = d.onset_index_j;
        dj["before"] = side_to_json(d.before);
        dj["after"] = side_to_json(d.after);
        dj["score"] = d.score;
        j["defects"].push_back(std::move(dj));
    }
    write_json(j, path);
}

LikelihoodAgeModel load_ml_model(const std::string& path) {
    const ordered_json j = read_json(path, "ml-age");
    LikelihoodAgeModel model;
    model.trusted_len = j.at("trusted_len").get<int>();
    model.trusted_timestamps = j.value("trusted_timestamps", std::vector<double>{});
    model.trusted_labels = j.value("trusted_labels", std::vector<int>{});
    for (const auto& dj : j.at("defects")) {
        DefectEstimate d;
        d.coord = coord_from_json(dj.at("coord"));
        d.onset_index_j = dj.at("onset_index_j").get<int>();
        d.before = side_from_json(dj.at("before"));
        d.after = side_from_json(dj.at("after"));
        d.score = dj.value("score", 0.0);
        model.defects.push_back(std::move(d));
    }
    model.validate();
    return model;
}

void save_model(const NBModel& model, const std::string& path) {
    ordered_json j;
    j["schema_version"] = kModelSchemaVersion;
    j["kind"] = "naive-bayes";
    j["variant"] = to_string(model.variant);
    j["bins"] = model.bins;
    j["classes"] = model.classes;
    j["priors"] = model.priors;
    j["defect_coords"] = ordered_json::array();
    for (const auto& c : model.defect_coords) j["defect_coords"].push_back(coord_to_json(c));
    j["he_lo"] = model.he_lo;
    j["he_width"] = model.he_width;
    j["density"] = ordered_json::array();
    for (const auto& per_class : model.density) {
        ordered_json row = ordered_json::array();
        for (const auto& den : per_class) {
            ordered_json dj;
            switch (model.variant) {
            case NbVariant::NE:
                dj["mean"] = den.mean;
                dj["sigma"] = den.sigma;
                break;
            case NbVariant::HE:
                dj["bin_prob"] = den.bin_prob;
                break;
            case NbVariant::KDE:
                dj["points"] = den.points;
                dj["bandwidth"] = den.bandwidth;
                break;
            }
            row.push_back(std::move(dj));
        }
        j["density"].push_back(std::move(row));
    }
    write_json(j, path);
}

NBModel load_nb_model(const std::string& path) {
    const ordered_json j = read_json(path, "naive-bayes");
    NBModel model;
    model.variant = nb_variant_from_string(j.at("variant").get<std::string>());
    model.bins = j.value("bins", 64);
    model.classes = j.at("classes").get<std::vector<int>>();
    model.priors = j.at("priors").get<std::vector<double>>();
    for (const auto& cj : j.value("defect_coords", ordered_json::array()))
        model.defect_coords.push_back(coord_from_json(cj));
    model.he_lo = j.value("he_lo", std::vector<double>{});
    model.he_width = j.value("he_width", std::vector<double>{});
    for (const auto& row : j.at("density")) {
        std::vector<NbDensity> per_class;
        for (const auto& dj : row) {
            NbDensity den;
            switch (model.variant) {
            case NbVariant::NE:
                den.mean = dj.at("mean").get<double>();
                den.sigma = dj.at("sigma").get<double>();
                break;
            case NbVariant::HE:
                den.bin_prob = dj.at("bin_prob").get<std::vector<double>>();
                break;
            case NbVariant::KDE:
                den.points = dj.at("points").get<std::vector<double>>();
                den.bandwidth = dj.at("bandwidth").get<double>();
                break;
            }
            per_class.push_back(std::move(den));
        }
        model.density.push_back(std::move(per_class));
    }
    return model;
}

void save_model(const PixelwiseKnnModel& model, const std::string& path) {
    ordered_json j;
    j["schema_version"] = kModelSchemaVersion;
    j["kind"] = "pixelwise-knn";
    j["block_size"] = model.block_size;
    j["k_neighbors"] = model.k_neighbors;
    j["classes"] = model.classes;
    j["sub_to_class"] = model.sub_to_class;
    j["seed"] = model.seed;
    j["image_width"] = model.image_width;
    j["image_height"] = model.image_height;
    j["blocks"] = ordered_json::array();
    for (const auto& b : model.blocks) {
        ordered_json bj;
        bj["origin"] = coord_to_json(b.origin);
        bj["classifiers"] = ordered_json::array();
        for (const auto& pc : b.selected) {
            ordered_json cj;
            cj["pixel"] = coord_to_json(pc.pixel);
            cj["validation_accuracy"] = pc.validation_accuracy;
            cj["sub_labels"] = pc.sub_labels;
            ordered_json feats = ordered_json::array();
            for (const auto& f : pc.features)
                feats.push_back(std::vector<float>(f.begin(), f.end()));
            cj["features"] = std::move(feats);
            bj["classifiers"].push_back(std::move(cj));
        }
        j["blocks"].push_back(std::move(bj));
    }
    write_json(j, path);
}

PixelwiseKnnModel load_knn_model(const std::string& path) {
    const ordered_json j = read_json(path, "pixelwise-knn");
    PixelwiseKnnModel model;
    model.block_size = j.at("block_size").get<int>();
    model.k_neighbors = j.at("k_neighbors").get<int>();
    model.classes = j.at("classes").get<std::vector<int>>();
    model.sub_to_class = j.at("sub_to_class").get<std::vector<int>>();
    model.seed = j.value("seed", std::uint64_t{0});
    model.image_width = j.at("image_width").get<int>();
    model.image_height = j.at("image_height").get<int>();
    for (const auto& bj : j.at("blocks")) {
        BlockModel b;
        b.origin = coord_from_json(bj.at("origin"));
        for (const auto& cj : bj.at("classifiers")) {
            PixelClassifier pc;
            pc.pixel = coord_from_json(cj.at("pixel"));
            pc.validation_accuracy = cj.at("validation_accuracy").get<double>();
            pc.sub_labels = cj.at("sub_labels").get<std::vector<int>>();
            for (const auto& fj : cj.at("features")) {
                const auto vals = fj.get<std::vector<float>>();
                if (vals.size() != kLvFeatureDim)
                    throw std::runtime_error("model feature dimension mismatch in " + path);
                std::array<float, kLvFeatureDim> f;
                std::copy(vals.begin(), vals.end(), f.begin());
                pc.features.push_back(f);
            }
            b.selected.push_back(std::move(pc));
        }
        model.blocks.push_back(std::move(b));
    }
    return model;
}

std::string model_kind(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read model: " + path);
    ordered_json j;
    in >> j;
    return j.value("kind", std::string{});
}

} // namespace agetrace
