#include "doctest.h"

#include "helpers.hpp"
#include "oracles.hpp"

#include "mmdes/dataset_io.hpp"
#include "mmdes/error.hpp"
#include "mmdes/metrics.hpp"
#include "mmdes/ridge.hpp"
#include "mmdes/splits.hpp"
#include "mmdes/standardize.hpp"
#include "mmdes/synthetic.hpp"
#include "mmdes/windowing.hpp"

#include "json.hpp"

#include <fstream>
#include <map>
#include <set>

using namespace mmdes;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

// Two persons, audio dim 3 + video dim 2, 10 frames.
fs::path write_small_manifest(const fs::path& dir) {
    Rng rng(5);
    std::vector<PersonRecord> persons = {testutil::random_person(rng, "A", testutil::small_schema(), 10),
                                         testutil::random_person(rng, "B", testutil::small_schema(), 10)};
    return write_dataset(MultimodalDataset(testutil::small_schema(), persons, 25.0), dir);
}

}  // namespace

TEST_CASE("load_dataset echoes the manifest schema") {
    const auto dir = testutil::scratch_dir("load_small");
    const auto ds = load_dataset(write_small_manifest(dir));
    CHECK(ds.schema().size() == 2);
    CHECK(ds.persons().size() == 2);
    CHECK(ds.person("B").frames() == 10);
    CHECK(ds.frame_rate_hz() == 25.0);
}

TEST_CASE("write then load reproduces a dataset exactly") {
    const auto dir = testutil::scratch_dir("roundtrip");
    SyntheticConfig cfg;
    cfg.persons = 3;
    cfg.frames = 40;
    const auto ds = generate_synthetic(cfg, 11);
    CHECK(load_dataset(write_dataset(ds, dir)) == ds);
}

TEST_CASE("load_dataset errors") {
    const auto dir = testutil::scratch_dir("load_errors");
    const auto manifest = write_small_manifest(dir);
    auto j = nlohmann::json::parse(std::ifstream(manifest));

    SUBCASE("missing group is a schema mismatch") {
        j["persons"][1]["files"].erase("acoustic");
        j["persons"][1]["files"]["mfcc"] = "B/acoustic.csv";
        write_file(manifest, j.dump());
        const auto msg = error_of([&] { load_dataset(manifest); });
        CHECK(msg.find("schema mismatch") != std::string::npos);
        CHECK(msg.find("acoustic") != std::string::npos);
    }
    SUBCASE("row with too many values names file, row and group") {
        write_file(dir / "A" / "acoustic.csv", "f0,f1,f2\n1,2,3\n1,2,3,4\n");
        const auto msg = error_of([&] { load_dataset(manifest); });
        CHECK(msg.find("acoustic.csv") != std::string::npos);
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("group acoustic") != std::string::npos);
    }
    SUBCASE("non-numeric cell") {
        write_file(dir / "A" / "appearance.csv", "f0,f1\n1,abc\n");
        CHECK(error_of([&] { load_dataset(manifest); }).find("non-numeric") != std::string::npos);
    }
    SUBCASE("missing file") {
        fs::remove(dir / "B" / "labels.csv");
        CHECK(error_of([&] { load_dataset(manifest); }).find("cannot open") != std::string::npos);
    }
    SUBCASE("frame-count mismatch between group and labels") {
        write_file(dir / "A" / "labels.csv", "arousal,valence\n0,0\n");
        CHECK(error_of([&] { load_dataset(manifest); }).find("person 'A'") != std::string::npos);
    }
}

TEST_CASE("dataset invariants") {
    Rng rng(1);
    auto a = testutil::random_person(rng, "A", testutil::small_schema(), 5);
    SUBCASE("duplicate ids") {
        CHECK_THROWS_AS(MultimodalDataset(testutil::small_schema(), {a, a}, 25.0), DataError);
    }
    SUBCASE("NaN label") {
        a.labels(2, 0) = std::nan("");
        CHECK_THROWS_AS(MultimodalDataset(testutil::small_schema(), {a}, 25.0), DataError);
    }
    SUBCASE("group order must follow the schema") {
        std::swap(a.groups[0], a.groups[1]);
        CHECK_THROWS_AS(MultimodalDataset(testutil::small_schema(), {a}, 25.0), DataError);
    }
}

TEST_CASE("synthetic data is a pure function of config and seed") {
    SyntheticConfig cfg;
    cfg.persons = 4;
    cfg.frames = 200;
    const auto a = generate_synthetic(cfg, 42);
    CHECK(a == generate_synthetic(cfg, 42));
    CHECK_FALSE(a == generate_synthetic(cfg, 43));
    CHECK(a.persons().front().id == "P01");
    for (const auto& p : a.persons()) {
        CHECK(p.labels.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        CHECK(p.groups.size() == cfg.groups.size());
    }
}

TEST_CASE("synthetic rejects non-positive sizes") {
    SyntheticConfig cfg;
    cfg.persons = 0;
    CHECK_THROWS(generate_synthetic(cfg, 1));
    cfg.persons = 2;
    cfg.frames = 0;
    CHECK_THROWS(generate_synthetic(cfg, 1));
}

TEST_CASE("noise-free synthetic audio is an exact linear function of arousal") {
    SyntheticConfig cfg;
    cfg.persons = 2;
    cfg.frames = 300;
    cfg.noise = 0.0;
    cfg.cross_informativeness = 0.0;
    const auto ds = generate_synthetic(cfg, 9);
    for (const auto& p : ds.persons()) {
        for (const auto& g : p.groups) {
            const Index lat = g.modality == Modality::Audio ? 0 : 1;
            // Fit each feature on [latent, 1] and check the residual.
            oracle::Mat x;
            for (Index t = 0; t < p.frames(); ++t) x.push_back({p.labels(t, lat)});
            for (Index c = 0; c < g.dim(); ++c) {
                std::vector<double> y(g.values.col(c).data(), g.values.col(c).data() + p.frames());
                const auto w = oracle::ridge(x, y, 0.0);
                double worst = 0.0;
                for (Index t = 0; t < p.frames(); ++t) {
                    worst = std::max(worst, std::abs(w[0] * x[t][0] + w[1] - y[t]));
                }
                CHECK(worst < 1e-9);
            }
        }
    }
}

TEST_CASE("without cross-information audio predicts arousal better than video") {
    SyntheticConfig cfg;
    cfg.persons = 6;
    cfg.frames = 400;
    cfg.cross_informativeness = 0.0;
    const auto ds = generate_synthetic(cfg, 3);
    std::vector<PersonRecord> train(ds.persons().begin(), ds.persons().begin() + 4);
    std::vector<PersonRecord> test(ds.persons().begin() + 4, ds.persons().end());
    const auto stdz = Standardizer::fit(train);
    std::vector<FrameSamples> tr, te;
    for (const auto& p : train) tr.push_back(frame_samples(stdz.apply(p), 4));
    for (const auto& p : test) te.push_back(frame_samples(stdz.apply(p), 4));
    const auto train_s = concat(tr), test_s = concat(te);
    for (Target t : {Target::Arousal, Target::Valence}) {
        const auto col = static_cast<Index>(t);
        auto score = [&](const std::string& group) {
            const auto& g = train_s.layout.slice(group);
            const auto r = train_ridge(train_s.group_block(g), train_s.y.col(col), 1.0);
            const Eigen::VectorXd pred = r.predict_rows(test_s.group_block(g));
            const Eigen::VectorXd gold = test_s.y.col(col);
            return ccc({gold.data(), static_cast<std::size_t>(gold.size())},
                       {pred.data(), static_cast<std::size_t>(pred.size())});
        };
        const double audio = score("acoustic");
        const double video = score("appearance");
        if (t == Target::Arousal) {
            CHECK(audio > video);
        } else {
            CHECK(video > audio);
        }
    }
}

TEST_CASE("split plan sizes and disjointness") {
    std::vector<std::string> ids;
    for (int i = 0; i < 18; ++i) ids.push_back("p" + std::to_string(i));
    const auto plan = make_split_plan(ids, 10, 42);
    REQUIRE(plan.repetitions.size() == 10);
    for (const auto& r : plan.repetitions) {
        CHECK(r.test_ids.size() == 3);
        CHECK(r.val_ids.size() == 3);
        CHECK(r.train_ids.size() == 12);
        std::set<std::string> all;
        for (const auto* part : {&r.train_ids, &r.val_ids, &r.test_ids}) all.insert(part->begin(), part->end());
        CHECK(all.size() == 18);
    }
    const auto again = make_split_plan(ids, 10, 42);
    for (std::size_t i = 0; i < 10; ++i) CHECK(again.repetitions[i].test_ids == plan.repetitions[i].test_ids);
}

TEST_CASE("split plan rejects too few persons") {
    std::vector<std::string> ids = {"a", "b", "c", "d", "e", "f"};
    CHECK_THROWS_AS(make_split_plan(ids, 1, 1), ConfigError);
    CHECK_NOTHROW(make_split_plan(ids, 1, 1, 2, 2));
}

TEST_CASE("every person is tested across ten repetitions for almost all seeds") {
    std::vector<std::string> ids;
    for (int i = 0; i < 18; ++i) ids.push_back("p" + std::to_string(i));
    std::map<std::string, int> seeds_tested;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::set<std::string> tested;
        for (const auto& r : make_split_plan(ids, 10, seed).repetitions) tested.insert(r.test_ids.begin(), r.test_ids.end());
        for (const auto& id : tested) ++seeds_tested[id];
    }
    for (const auto& id : ids) CHECK(seeds_tested[id] >= 95);
}

TEST_CASE("frame_samples windowing") {
    Rng rng(2);
    const auto p = testutil::random_person(rng, "A", testutil::small_schema(), 5);

    SUBCASE("context 1 is the raw frame") {
        const auto s = frame_samples(p, 1);
        CHECK(s.x.rows() == 5);
        CHECK(s.x.row(3).head(3) == p.groups[0].values.row(3));
        CHECK(s.x.row(3).tail(2) == p.groups[1].values.row(3));
    }
    SUBCASE("frame 0 is padded by repetition") {
        const auto s = frame_samples(p, 3);
        const auto& g = s.layout.slice("acoustic");
        for (Index j = 0; j < 3; ++j) CHECK(s.x.row(0).segment(g.offset + 3 * j, 3) == p.groups[0].values.row(0));
    }
    SUBCASE("width is sum of dim times context") {
        CHECK(frame_samples(p, 4).x.cols() == 20);
    }
    SUBCASE("windows past the warm-up contain no padding") {
        const auto s = frame_samples(p, 3);
        const auto& g = s.layout.slice("appearance");
        for (Index t = 2; t < 5; ++t) {
            for (Index j = 0; j < 3; ++j) {
                CHECK(s.x.row(t).segment(g.offset + 2 * j, 2) == p.groups[1].values.row(t - 2 + j));
            }
        }
    }
}

TEST_CASE("neighbor keys keep the newest frames of every group") {
    Rng rng(3);
    const auto p = testutil::random_person(rng, "A", testutil::small_schema(), 6);
    const auto s = frame_samples(p, 4);
    const auto keys = neighbor_keys(s, 1);
    REQUIRE(keys.cols() == 5);
    CHECK(keys.row(5).head(3) == p.groups[0].values.row(5));
    CHECK(keys.row(5).tail(2) == p.groups[1].values.row(5));
    CHECK(neighbor_keys(s, 4) == s.x);
}

TEST_CASE("standardizer uses training statistics") {
    Rng rng(4);
    std::vector<PersonRecord> train = {testutil::random_person(rng, "A", testutil::small_schema(), 50),
                                       testutil::random_person(rng, "B", testutil::small_schema(), 30)};
    const auto stdz = Standardizer::fit(train);
    Eigen::MatrixXd stacked(80, 3);
    stacked << stdz.apply(train[0]).groups[0].values, stdz.apply(train[1]).groups[0].values;
    for (Index c = 0; c < 3; ++c) {
        CHECK(stacked.col(c).mean() == doctest::Approx(0.0).epsilon(1e-12));
        const double var = (stacked.col(c).array() - stacked.col(c).mean()).square().mean();
        CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    }
    PersonRecord constant = train[0];
    constant.groups[1].values.setConstant(3.0);
    const auto s2 = Standardizer::fit(std::vector<PersonRecord>{constant});
    CHECK(s2.apply(constant).groups[1].values.isZero(0.0));
}
