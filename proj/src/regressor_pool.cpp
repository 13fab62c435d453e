#include "mmdes/regressor_pool.hpp"

#include "mmdes/dataset_io.hpp"
#include "mmdes/error.hpp"

#include <fstream>

namespace mmdes {

namespace fs = std::filesystem;
using nlohmann::json;

RegressorPool train_pool(const FrameSamples& train, Target target, double lambda) {
    if (train.layout.groups.empty()) throw DataError("train_pool: layout has no groups");
    RegressorPool pool;
    pool.target = target;
    pool.layout = train.layout;
    const Eigen::VectorXd y = train.y.col(static_cast<Index>(target));
    for (const auto& g : train.layout.groups) {
        pool.regressors.push_back(train_ridge(train.group_block(g), y, lambda, g.name, g.modality));
    }
    return pool;
}

PoolPredictions predict(const RegressorPool& pool, const FrameSamples& samples) {
    if (!(samples.layout == pool.layout)) {
        throw DataError("predict: sample layout does not match the pool's training layout");
    }
    PoolPredictions out;
    out.target = pool.target;
    out.values.resize(samples.size(), static_cast<Index>(pool.size()));
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& reg = pool.regressors[i];
        const auto& g = samples.layout.slice(reg.group_name);
        out.values.col(static_cast<Index>(i)) = reg.predict_rows(samples.x.middleCols(g.offset, g.width));
        out.names.push_back(reg.group_name);
        out.modalities.push_back(reg.modality);
    }
    out.labels = samples.y.col(static_cast<Index>(pool.target));
    return out;
}

ValidationErrorTable build_validation_table(const PoolPredictions& predictions, Eigen::MatrixXd keys) {
    if (predictions.frames() == 0) throw DataError("validation table: empty validation set");
    if (predictions.labels.size() != predictions.frames()) {
        throw DataError("validation table: predictions carry no aligned labels");
    }
    if (keys.rows() != predictions.frames()) {
        throw DataError("validation table: key rows differ from prediction rows");
    }
    ValidationErrorTable table;
    table.predictions = predictions.values;
    table.labels = predictions.labels;
    table.errors = (predictions.values.colwise() - predictions.labels).cwiseAbs2();
    table.keys = std::move(keys);
    return table;
}

ValidationErrorTable build_validation_table(const RegressorPool& pool, const FrameSamples& val,
                                            Index key_context) {
    if (val.size() == 0) throw DataError("validation table: empty validation set");
    return build_validation_table(predict(pool, val), neighbor_keys(val, key_context));
}

fs::path sidecar_path(const fs::path& csv_path) {
    fs::path p = csv_path;
    p.replace_extension(".json");
    return p;
}

void write_predictions(const fs::path& csv_path, const PoolPredictions& predictions) {
    if (predictions.labels.size() != predictions.frames()) {
        throw DataError("write_predictions: labels are not aligned with predictions");
    }
    std::vector<std::string> header = predictions.names;
    header.push_back("label");
    Eigen::MatrixXd table(predictions.frames(), predictions.pool_size() + 1);
    table << predictions.values, predictions.labels;
    write_numeric_csv(csv_path, header, table);

    json side;
    side["target"] = to_string(predictions.target);
    side["columns"] = json::array();
    for (std::size_t i = 0; i < predictions.names.size(); ++i) {
        side["columns"].push_back(
            {{"name", predictions.names[i]}, {"modality", to_string(predictions.modalities[i])}});
    }
    side["label_column"] = "label";
    std::ofstream out(sidecar_path(csv_path));
    if (!out) throw DataError("cannot write " + sidecar_path(csv_path).string());
    out << side.dump(2) << '\n';
}

PoolPredictions load_predictions(const fs::path& csv_path, std::optional<Index> expected_rows) {
    const fs::path side_path = sidecar_path(csv_path);
    std::ifstream side_in(side_path);
    if (!side_in) throw DataError("missing column mapping " + side_path.string() + " for " + csv_path.string());
    json side;
    try {
        side = json::parse(side_in);
    } catch (const json::parse_error& e) {
        throw DataError(side_path.string() + ": " + e.what());
    }
    if (!side.contains("columns") || !side["columns"].is_array()) {
        throw DataError(side_path.string() + ": missing column/modality mapping");
    }

    PoolPredictions out;
    out.target = parse_target(side.value("target", "arousal"));
    std::vector<std::string> header;
    for (const auto& c : side["columns"]) {
        if (!c.contains("name") || !c.contains("modality")) {
            throw DataError(side_path.string() + ": every column needs a name and a modality");
        }
        out.names.push_back(c["name"].get<std::string>());
        out.modalities.push_back(parse_modality(c["modality"].get<std::string>()));
        header.push_back(out.names.back());
    }
    if (out.names.empty()) throw DataError(side_path.string() + ": mapping declares no regressor columns");
    header.push_back(side.value("label_column", std::string("label")));

    // Check the column count first so the error says what is wrong.
    {
        std::ifstream in(csv_path);
        if (!in) throw DataError("cannot open " + csv_path.string());
        std::string line;
        std::getline(in, line);
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError(csv_path.string() + ": mapping declares " + std::to_string(header.size() - 1) +
                            " regressor columns plus a label, CSV has " + std::to_string(cells.size()) +
                            " columns");
        }
    }
    const Eigen::MatrixXd table = read_numeric_csv(csv_path, header, "predictions");
    if (expected_rows && table.rows() != *expected_rows) {
        throw DataError(csv_path.string() + ": " + std::to_string(table.rows()) + " rows, dataset has " +
                        std::to_string(*expected_rows) + " frames");
    }
    out.values = table.leftCols(table.cols() - 1);
    out.labels = table.col(table.cols() - 1);
    return out;
}

json pool_to_json(const RegressorPool& pool) {
    json j;
    j["format"] = "mmdes-pool/1";
    j["target"] = to_string(pool.target);
    j["context_len"] = pool.layout.context_len;
    j["groups"] = json::array();
    for (const auto& g : pool.layout.groups) {
        j["groups"].push_back({{"name", g.name}, {"modality", to_string(g.modality)}, {"dim", g.dim}});
    }
    j["regressors"] = json::array();
    for (const auto& r : pool.regressors) {
        j["regressors"].push_back({{"group", r.group_name},
                                   {"modality", to_string(r.modality)},
                                   {"lambda", r.lambda},
                                   {"weights", std::vector<double>(r.weights.begin(), r.weights.end())}});
    }
    return j;
}

RegressorPool pool_from_json(const json& j) {
    try {
        if (j.at("format") != "mmdes-pool/1") throw DataError("unsupported pool format");
        std::vector<GroupSpec> schema;
        for (const auto& g : j.at("groups")) {
            schema.push_back({g.at("name").get<std::string>(), parse_modality(g.at("modality").get<std::string>()),
                              g.at("dim").get<Index>()});
        }
        RegressorPool pool;
        pool.target = parse_target(j.at("target").get<std::string>());
        pool.layout = SampleLayout::from_schema(schema, j.at("context_len").get<Index>());
        for (const auto& r : j.at("regressors")) {
            const auto w = r.at("weights").get<std::vector<double>>();
            Regressor reg{r.at("group").get<std::string>(), parse_modality(r.at("modality").get<std::string>()),
                          Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Index>(w.size())),
                          r.at("lambda").get<double>()};
            if (reg.input_dim() != pool.layout.slice(reg.group_name).width) {
                throw DataError("pool JSON: weight count does not match group '" + reg.group_name + "'");
            }
            pool.regressors.push_back(std::move(reg));
        }
        return pool;
    } catch (const json::exception& e) {
        throw DataError(std::string("pool JSON: ") + e.what());
    }
}

}  // namespace mmdes
