#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pcclsm/error.hpp"
#include "pcclsm/pipeline.hpp"
#include "pcclsm/random.hpp"
#include "pcclsm/reports.hpp"
#include "support/synthetic.hpp"

using namespace pcclsm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("pcclsm-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json(const fs::path& p) { return json::parse(read_file(p)); }

// Independent uniform columns: no pair can reach |PCC| = 1.
std::string random_csv(std::size_t rows, std::uint64_t seed) {
    Rng rng(seed);
    std::string out = "id,a,b,c,d,label\n";
    for (std::size_t r = 0; r < rows; ++r) {
        out += std::to_string(r);
        for (int c = 0; c < 4; ++c) out += "," + reports::format_double(rng.uniform(-1.0, 1.0));
        out += r % 2 == 0 ? ",0\n" : ",1\n";
    }
    return out;
}

PipelineConfig config_for(const fs::path& csv, const fs::path& out) {
    PipelineConfig c;
    c.dataset.path = csv;
    c.dataset.category_column.reset();
    c.output_dir = out;
    c.evaluation.timing_repeats = 1;
    return c;
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("empty object yields every default") {
        const auto c = PipelineConfig::from_json(json::object());
        CHECK(c.selection.pcc_threshold == 0.85);
        CHECK(c.split.test_fraction == 0.3);
        CHECK(c.split.seed == 42);
        CHECK(c.classifiers.size() == 5);
        CHECK(c.configurations.size() == 4);
        CHECK(c.dataset.drop_columns == std::vector<std::string>{"id"});
        CHECK(c.dataset.category_column == "attack_cat");
        CHECK(!c.sample.rows);
    }

    TEST_CASE("unknown keys are rejected at every level") {
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"thresold": 0.9})")), UsageError);
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"selection": {"threshold": 0.9}})")), UsageError);
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"classifiers": [{"kind": "knn", "k": 3}]})")),
                        UsageError);
        CHECK_THROWS_AS(
            PipelineConfig::from_json(json::parse(R"({"classifiers": [{"kind": "knn", "hyperparameters": {"depth": 3}}]})")),
            UsageError);
    }

    TEST_CASE("out-of-range values and bad names are rejected") {
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"selection": {"pcc_threshold": 0}})")), UsageError);
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"selection": {"pcc_threshold": 1.5}})")), UsageError);
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"split": {"test_fraction": 1}})")), UsageError);
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"sample": {"rows": 0}})")), UsageError);
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"configurations": ["lsm"]})")), UsageError);
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"configurations": []})")), UsageError);
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"classifiers": [{"kind": "rbf"}]})")), UsageError);
        CHECK_THROWS_AS(PipelineConfig::from_json(json::parse(R"({"split": {"seed": "x"}})")), UsageError);
    }

    TEST_CASE("to_json echoes effective defaults and round-trips") {
        const auto c = PipelineConfig::from_json(json::parse(R"({"classifiers": [{"kind": "random_forest"}]})"));
        const auto j = c.to_json();
        CHECK(j["classifiers"][0]["hyperparameters"]["n_trees"] == 100);
        CHECK(j["classifiers"][0]["hyperparameters"]["max_depth"] == 12);
        CHECK(j["selection"]["pcc_threshold"] == 0.85);
        CHECK(j["evaluation"]["timing_repeats"] == 3);
        const auto again = PipelineConfig::from_json(json::parse(j.dump()));
        CHECK(again.to_json() == j);
    }

    TEST_CASE("one seed overrides split, sample and classifiers") {
        auto c = PipelineConfig::from_json(json::object());
        c.override_seed(9);
        CHECK(c.split.seed == 9);
        CHECK(c.sample.seed == 9);
        for (const auto& s : c.classifiers) CHECK(s.seed == 9);
    }

    TEST_CASE("relative dataset path resolves against the config file") {
        const auto dir = scratch("config-path");
        write_file(dir / "run.json", R"({"dataset": {"path": "data/train.csv"}})");
        CHECK(load_config(dir / "run.json").dataset.path == dir / "data/train.csv");
        write_file(dir / "broken.json", "{");
        CHECK_THROWS_AS(load_config(dir / "broken.json"), UsageError);
    }
}

TEST_SUITE("reports") {
    TEST_CASE("doubles print in shortest round-trip form") {
        CHECK(reports::format_double(0.1) == "0.1");
        CHECK(reports::format_double(1e-300) == "1e-300");
        CHECK(std::stod(reports::format_double(2.0 / 3.0)) == 2.0 / 3.0);
        CHECK(reports::format_optional(std::nullopt).empty());
    }

    TEST_CASE("CSV fields are quoted only when needed") {
        CHECK(reports::csv_row({"a", "b,c", "say \"hi\""}) == "a,\"b,c\",\"say \"\"hi\"\"\"\n");
    }

    TEST_CASE("timing keys are stripped recursively") {
        reports::ordered_json j = {{"a", 1}, {"train_time_s", 2.0}, {"list", {{{"x_s", 1}, {"y", 2}}}}};
        const auto s = reports::without_timings(j);
        CHECK(!s.contains("train_time_s"));
        CHECK(s["list"][0].size() == 1);
        CHECK(s["a"] == 1);
    }
}

TEST_SUITE("commands") {
    TEST_CASE("threshold 1.0 on tie-free data drops nothing") {
        const auto dir = scratch("select-none");
        write_file(dir / "d.csv", random_csv(200, 5));
        auto c = config_for(dir / "d.csv", dir / "out");
        c.selection.pcc_threshold = 1.0;
        const auto r = cmd_select(c);
        CHECK(r.written.size() == 3);
        const auto sel = read_json(dir / "out/selection_report.json");
        CHECK(sel["dropped"].empty());
        CHECK(sel["kept"].size() == 4);
        const auto m = read_json(r.manifest);
        CHECK(m["complete"] == true);
        CHECK(m["command"] == "select");
    }

    TEST_CASE("missing dataset fails with acquisition instructions; manifest stays incomplete") {
        const auto dir = scratch("missing");
        auto c = config_for(dir / "nope.csv", dir / "out");
        try {
            cmd_select(c);
            FAIL("expected a data error");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("not found") != std::string::npos);
            CHECK(std::string(e.what()).find("UNSW") != std::string::npos);
        }
        const auto m = read_json(dir / "out/run_manifest.json");
        CHECK(m["complete"] == false);
        CHECK(m.contains("error"));
    }

    TEST_CASE("configured hash is verified") {
        const auto dir = scratch("hash");
        write_file(dir / "d.csv", random_csv(50, 1));
        auto c = config_for(dir / "d.csv", dir / "out");
        c.dataset.sha256 = std::string(64, '0');
        CHECK_THROWS_AS(cmd_select(c), DataError);
        c.dataset.sha256 = sha256_file(dir / "d.csv");
        CHECK_NOTHROW(cmd_select(c));
        write_file(dir / "abc", "abc");
        CHECK(sha256_file(dir / "abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("exact-fit data distorts to the scaled input with zero residual") {
        // x = 2 * label + 1, so label = 0.5 x - 0.5 exactly and z gets no weight.
        const auto dir = scratch("exact");
        std::string csv = "x,z,label\n";
        for (int r = 0; r < 10; ++r) {
            csv += std::to_string(2 * (r % 2) + 1) + "," + std::to_string((r * 7) % 5) + "," + std::to_string(r % 2) + "\n";
        }
        write_file(dir / "d.csv", csv);
        auto c = config_for(dir / "d.csv", dir / "out");
        c.dataset.drop_columns.clear();
        c.configurations = {ConfigurationTag::lsm_only};
        cmd_distort(c);
        const auto model = read_json(dir / "out/distortion_lsm_only.json")["model"];
        CHECK(std::abs(model["residual_mse"].get<double>()) <= 1e-24);
        CHECK(model["beta"]["x"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(model["beta"]["z"].get<double>()) <= 1e-12);
        const auto table = load_csv(dir / "out/distorted_lsm_only.csv");
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            const double x = 2.0 * static_cast<double>(r % 2) + 1.0;
            CHECK(std::stod(table.rows[r][0]) == doctest::Approx(0.5 * x - 0.5).epsilon(1e-12));
        }
        CHECK(fs::exists(dir / "out/privacy_lsm_only.json"));
    }

    TEST_CASE("distortion of a one-row dataset is a precondition error") {
        const auto dir = scratch("one-row");
        write_file(dir / "d.csv", "x,y,label\n1,2,1\n");
        auto c = config_for(dir / "d.csv", dir / "out");
        c.dataset.drop_columns.clear();
        c.configurations = {ConfigurationTag::lsm_only};
        CHECK_THROWS_AS(cmd_distort(c), NumericError);
    }

    TEST_CASE("distort without a distorting configuration is a usage error") {
        const auto dir = scratch("no-lsm");
        write_file(dir / "d.csv", random_csv(40, 2));
        auto c = config_for(dir / "d.csv", dir / "out");
        c.configurations = {ConfigurationTag::baseline};
        CHECK_THROWS_AS(cmd_distort(c), UsageError);
    }

    TEST_CASE("four configurations give 4 evaluation, 2 privacy and 1 comparison file") {
        const auto dir = scratch("evaluate");
        synthetic::write_unsw_like_csv(dir / "d.csv", 600, 4);
        PipelineConfig c;
        c.dataset.path = dir / "d.csv";
        c.output_dir = dir / "out";
        c.evaluation.timing_repeats = 1;
        c.classifiers = {ClassifierSpec::defaults(ClassifierKind::knn), ClassifierSpec::defaults(ClassifierKind::svm)};
        cmd_evaluate(c);
        std::size_t evaluations = 0, privacy = 0, comparisons = 0;
        for (const auto& e : fs::directory_iterator(dir / "out")) {
            const auto name = e.path().filename().string();
            evaluations += name.rfind("evaluation_", 0) == 0 && e.path().extension() == ".json";
            privacy += name.rfind("privacy_", 0) == 0 && e.path().extension() == ".json";
            comparisons += name == "utility_comparison.json";
        }
        CHECK(evaluations == 4);
        CHECK(privacy == 2);
        CHECK(comparisons == 1);
        CHECK(read_json(dir / "out/utility_comparison.json")["comparisons"].size() == 3);
        const auto table = load_csv(dir / "out/privacy_table.csv");
        CHECK(table.header[1] == "VD");
        CHECK(table.header[6] == "Time");
        CHECK(table.row_count() == 2);
    }

    TEST_CASE("a knn-only run reports exactly one classifier") {
        const auto dir = scratch("knn-only");
        synthetic::write_unsw_like_csv(dir / "d.csv", 300, 6);
        PipelineConfig c;
        c.dataset.path = dir / "d.csv";
        c.output_dir = dir / "out";
        c.evaluation.timing_repeats = 1;
        c.configurations = {ConfigurationTag::pcc_lsm};
        c.classifiers = {ClassifierSpec::defaults(ClassifierKind::knn)};
        cmd_evaluate(c);
        CHECK(read_json(dir / "out/evaluation_pcc_lsm.json")["results"].size() == 1);
    }

    TEST_CASE("seeded pipeline reruns are identical apart from timings") {
        const auto dir = scratch("rerun");
        synthetic::write_unsw_like_csv(dir / "d.csv", 5000, 8);
        PipelineConfig c;
        c.dataset.path = dir / "d.csv";
        c.output_dir = dir / "out";
        c.evaluation.timing_repeats = 1;
        c.evaluation.save_models = true;
        c.sample.rows = 3000;
        c.classifiers = {ClassifierSpec::defaults(ClassifierKind::decision_tree),
                         ClassifierSpec::defaults(ClassifierKind::naive_bayes)};
        const auto first = cmd_pipeline(c);
        fs::rename(dir / "out", dir / "first");
        const auto second = cmd_pipeline(c);
        REQUIRE(first.written == second.written);
        for (const auto& f : first.written) {
            CAPTURE(f.string());
            const auto a = read_file(dir / "first" / f);
            const auto b = read_file(dir / "out" / f);
            if (f.extension() == ".json") {
                CHECK(reports::without_timings(json::parse(a)).dump() == reports::without_timings(json::parse(b)).dump());
            } else if (f.filename() != "evaluation_results.csv" && f.filename() != "privacy_table.csv") {
                CHECK(a == b);
            }
        }
        const auto m = read_json(second.manifest);
        CHECK(m["complete"] == true);
        CHECK(m["config"]["classifiers"][0]["hyperparameters"]["max_depth"] == 12);
        CHECK(m["seeds"]["split"] == 42);
        CHECK(m["dataset"]["rows_used"] == 3000);
    }

    TEST_CASE("sample larger than the dataset is rejected") {
        const auto dir = scratch("sample");
        write_file(dir / "d.csv", random_csv(20, 3));
        auto c = config_for(dir / "d.csv", dir / "out");
        c.sample.rows = 21;
        CHECK_THROWS_AS(cmd_select(c), UsageError);
    }
}

#ifdef PCCLSM_CLI
TEST_SUITE("cli") {
    int run(const std::string& args) {
        const std::string cmd = std::string(PCCLSM_CLI) + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    TEST_CASE("exit codes: 0 success, 1 usage, 2 data, 3 numeric") {
        const auto dir = scratch("cli");
        write_file(dir / "d.csv", random_csv(60, 4));
        write_file(dir / "ok.json",
                   R"({"dataset": {"path": "d.csv", "category_column": null}, "output_dir": ")" +
                       (dir / "out").string() + R"(", "evaluation": {"timing_repeats": 1}})");
        CHECK(run("select --config " + (dir / "ok.json").string()) == 0);
        CHECK(fs::exists(dir / "out/selection_report.json"));
        CHECK(run("select --config " + (dir / "ok.json").string() + " --output " + (dir / "other").string() +
                  " --sample 40 --seed 7") == 0);
        CHECK(read_json(dir / "other/run_manifest.json")["seeds"]["split"] == 7);

        CHECK(run("") == 1);
        CHECK(run("frobnicate") == 1);
        CHECK(run("select") == 1);
        write_file(dir / "bad.json", R"({"selection": {"pcc_threshold": 2}})");
        CHECK(run("select --config " + (dir / "bad.json").string()) == 1);

        write_file(dir / "missing.json", R"({"dataset": {"path": "absent.csv"}})");
        CHECK(run("select --config " + (dir / "missing.json").string()) == 2);

        write_file(dir / "dup.csv", "a,b,label\n1,1,0\n2,2,1\n3,3,0\n4,4,1\n");
        write_file(dir / "dup.json", R"({"dataset": {"path": "dup.csv", "drop_columns": [], "category_column": null},
                                         "configurations": ["lsm_only"], "output_dir": ")" +
                                         (dir / "dup-out").string() + R"("})");
        CHECK(run("distort --config " + (dir / "dup.json").string()) == 3);
    }
}
#endif
