#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "agetrace/dataset.hpp"

using namespace agetrace;
namespace fs = std::filesystem;

namespace {

std::string cli() {
#ifdef AGETRACE_CLI_PATH
    return AGETRACE_CLI_PATH;
#else
    const char* p = std::getenv("AGETRACE_CLI_PATH");
    REQUIRE_MESSAGE(p != nullptr, "AGETRACE_CLI_PATH must point at the CLI binary");
    return p;
#endif
}

int run(const std::string& args) {
    const std::string cmd = '"' + cli() + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

// One tiny dataset shared by the cases below, rendered on first use.
const fs::path& dataset_dir() {
    static const fs::path dir = [] {
        const fs::path root = fs::temp_directory_path() / "agetrace_cli_test";
        fs::remove_all(root);
        fs::create_directories(root);

        DatasetSpec spec;
        spec.profile.width = 16;
        spec.profile.height = 16;
        spec.profile.bit_depth = 16;
        spec.profile.read_noise_sigma = 1.0;
        spec.session_times = {10.0, 40.0};
        spec.images_per_session = 2;
        spec.dark_fields_per_session = 1;
        spec.bright_fields_per_session = 1;
        spec.scene_kind = SceneKind::Textured;
        spec.rate_per_day_override = 0.05;
        spec.rng_seed = 412;
        spec.dataset_id = "cli-test";
        DefectRecord forced;
        forced.coord = {6, 7, 0};
        forced.defect_type = DefectType::Hot;
        forced.dark_current_D = 2000.0;
        forced.onset_time = 1.0;
        spec.forced_defects.push_back(forced);

        std::ofstream(root / "spec.json") << dataset_spec_to_json_text(spec);
        REQUIRE(run("simulate --spec \"" + (root / "spec.json").string() + "\" --out \"" +
                    (root / "data").string() + '"') == 0);
        REQUIRE(fs::exists(root / "data" / "manifest.jsonl"));
        return root;
    }();
    return dir;
}

std::string manifest_arg() {
    return "--manifest \"" + (dataset_dir() / "data" / "manifest.jsonl").string() + "\" ";
}

} // namespace

TEST_CASE("usage errors exit with the validation code") {
    CHECK(run("") == 2);
    CHECK(run("--help") == 0);
    CHECK(run("transmogrify") == 2);
    CHECK(run("detect") == 2);                       // missing required options
    CHECK(run("detect --manifest x --out y --kernel 4") == 2);
}

TEST_CASE("missing inputs exit with the i/o code") {
    const auto out = (fs::temp_directory_path() / "agetrace_cli_unused.json").string();
    CHECK(run("detect --manifest /nonexistent/manifest.jsonl --out \"" + out + '"') == 3);
    CHECK(run("approximate " + manifest_arg() + "--model /nonexistent/model.json --out \"" +
              out + '"') == 3);
}

TEST_CASE("malformed spec json exits with the validation code") {
    const auto bad = dataset_dir() / "bad_spec.json";
    std::ofstream(bad) << "{ this is not json";
    CHECK(run("simulate --spec \"" + bad.string() + "\" --out \"" +
              (dataset_dir() / "bad_out").string() + '"') == 2);
}

TEST_CASE("detect writes a versioned report over the rendered dataset") {
    const auto out = dataset_dir() / "detect_report.json";
    REQUIRE(run("detect " + manifest_arg() + "--out \"" + out.string() + '"') == 0);

    std::ifstream in(out);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    CHECK(j.at("schema_version").get<int>() == 1);
    CHECK(j.at("command").get<std::string>() == "detect");
    CHECK(j.at("defect_count").get<int>() >= 1); // the forced hot pixel at least
    CHECK(j.at("config").at("threshold").get<double>() == 14.0);
}

TEST_CASE("unknown estimators exit with the validation code") {
    const auto out = (dataset_dir() / "model.json").string();
    CHECK(run("train " + manifest_arg() + "--estimator parzen --out \"" + out + '"') == 2);
    CHECK(run("train " + manifest_arg() + "--estimator knn --out \"" + out + '"') == 2);
}
