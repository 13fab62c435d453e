#include "doctest.h"

#include "helpers.hpp"

#include "mmdes/dataset_io.hpp"
#include "mmdes/error.hpp"
#include "mmdes/harness.hpp"
#include "mmdes/regressor_pool.hpp"

#include <fstream>
#include <sstream>

using namespace mmdes;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.source.synthetic.persons = 8;
    c.source.synthetic.frames = 200;
    c.repetitions = 2;
    c.k = 20;
    c.context_len = 3;
    c.meta.window_len = 50;
    c.meta.epochs = 50;
    c.cross_attention.clips = 3;
    c.cross_attention.clip_len = 2;
    c.cross_attention.train_stride = 8;
    c.cross_attention.epochs = 5;
    c.seed = 5;
    return c;
}

}  // namespace

TEST_CASE("report covers every configured cell") {
    const auto cfg = small_config();
    const auto r = run_experiment(cfg);
    CHECK(r.methods.size() == 6);
    CHECK(r.cells.size() == 2 * 5 * 6);
    for (Target t : cfg.targets) {
        for (const auto& s : cfg.scenarios) {
            for (const auto& m : r.methods) {
                const auto& c = r.cell(t, s.label(), m);
                REQUIRE(c.values.size() == 2);
                for (double v : c.values) {
                    CHECK(v >= -1.0);
                    CHECK(v <= 1.0);
                }
                CHECK(c.std >= 0.0);
                CHECK(c.mean == doctest::Approx(mean_of(c.values)));
            }
        }
    }
    CHECK(r.pool.size() == 2 * 5);
    CHECK(r.config == config_to_json(cfg));
}

TEST_CASE("same config and seed give identical reports regardless of jobs") {
    auto cfg = small_config();
    cfg.cross_attention.enabled = false;
    const auto a = render_report(run_experiment(cfg), "json");
    CHECK(render_report(run_experiment(cfg), "json") == a);
    RunOptions two;
    two.jobs = 2;
    CHECK(render_report(run_experiment(cfg, two), "json") == a);
    cfg.seed = 6;
    CHECK(render_report(run_experiment(cfg), "json") != a);
}

TEST_CASE("a single scenario gives one row per target") {
    auto cfg = small_config();
    cfg.scenarios = {ImputationMode::none()};
    cfg.cross_attention.enabled = false;
    const auto r = run_experiment(cfg);
    CHECK(r.scenarios == std::vector<std::string>{"none"});
    CHECK(r.cells.size() == 2 * 5);
    std::size_t rows = 0;
    std::istringstream md(render_report(r, "markdown"));
    for (std::string line; std::getline(md, line);) rows += line.rfind("| Audio and video available", 0) == 0;
    CHECK(rows == 2);
}

TEST_CASE("disabling audio changes the pool mean") {
    auto cfg = small_config();
    cfg.cross_attention.enabled = false;
    cfg.repetitions = 1;
    const auto r = run_experiment(cfg);
    CHECK(r.cell(Target::Arousal, "zero_audio", "Mean").mean != r.cell(Target::Arousal, "none", "Mean").mean);
}

TEST_CASE("weights dump") {
    const auto dir = testutil::scratch_dir("weights");
    auto cfg = small_config();
    cfg.cross_attention.enabled = false;
    cfg.repetitions = 1;
    cfg.scenarios = {ImputationMode::none(), ImputationMode::zero(Modality::Video)};
    RunOptions opts;
    opts.dump_weights = dir / "w.csv";
    run_experiment(cfg, opts);
    std::ifstream in(dir / "w.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "repetition,scenario,target,method,person_id,frame,alpha_0,alpha_1,alpha_2,alpha_3,alpha_4");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        REQUIRE(cells.size() == 11);
        double sum = 0.0;
        for (std::size_t i = 6; i < 11; ++i) sum += std::stod(cells[i]);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    // 3 test persons x 200 frames x 2 scenarios x 2 targets x 4 methods
    CHECK(rows == 3 * 200 * 2 * 2 * 4);
}

TEST_CASE("externally supplied predictions") {
    const auto dir = testutil::scratch_dir("external");
    SyntheticConfig syn;
    syn.persons = 8;
    syn.frames = 200;
    const auto ds = generate_synthetic(syn, 2);
    write_dataset(ds, dir / "data");

    Rng rng(3);
    PoolPredictions preds;
    preds.target = Target::Arousal;
    preds.names = {"oracle", "noise"};
    preds.modalities = {Modality::Audio, Modality::Video};
    preds.values.resize(8 * 200, 2);
    preds.labels.resize(8 * 200);
    Index row = 0;
    for (const auto& p : ds.persons()) {
        for (Index t = 0; t < p.frames(); ++t, ++row) {
            preds.labels(row) = p.labels(t, 0);
            preds.values(row, 0) = p.labels(t, 0);
            preds.values(row, 1) = rng.normal();
        }
    }
    write_predictions(dir / "arousal_none.csv", preds);

    std::ofstream(dir / "config.json") << R"({
        "source": {"kind": "predictions", "manifest": "data/manifest.json",
                   "predictions": {"arousal": {"none": "arousal_none.csv"}}},
        "repetitions": 2, "k": 10, "context_len": 2, "meta": {"window_len": 50},
        "cross_attention": {"enabled": false},
        "scenarios": ["none"], "targets": ["arousal"]
    })";
    const auto r = run_experiment(load_experiment_config(dir / "config.json"));
    CHECK(r.cell(Target::Arousal, "none", "DS").mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.cell(Target::Arousal, "none", "DW").mean > 0.999);
    CHECK(r.cell(Target::Arousal, "none", "Mean").mean < 0.9);
    CHECK(r.pool.front().regressor == "oracle");

    std::ofstream(dir / "short.csv") << "oracle,noise,label\n1,2,3\n";
    std::filesystem::copy_file(sidecar_path(dir / "arousal_none.csv"), sidecar_path(dir / "short.csv"));
    auto cfg = load_experiment_config(dir / "config.json");
    cfg.source.predictions[Target::Arousal]["none"] = dir / "short.csv";
    CHECK_THROWS_AS(run_experiment(cfg), DataError);
}

TEST_CASE("errors carry the repetition") {
    auto cfg = small_config();
    cfg.cross_attention.clips = 50;
    cfg.cross_attention.clip_len = 10;
    std::string msg;
    try {
        run_experiment(cfg);
    } catch (const Error& e) {
        msg = e.what();
    }
    CHECK(msg.find("repetition 0") != std::string::npos);
}

TEST_CASE("too few persons for the split") {
    auto cfg = small_config();
    cfg.source.synthetic.persons = 6;
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}
