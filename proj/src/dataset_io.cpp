#include "mmdes/dataset_io.hpp"

#include "mmdes/error.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mmdes {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t start = 0;
        while (start < cell.size() && cell[start] == ' ') ++start;
        cells.push_back(cell.substr(start));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& cell, const std::string& context) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || cell.empty()) {
        throw DataError(context + ": non-numeric cell '" + cell + "'");
    }
    if (!std::isfinite(value)) throw DataError(context + ": non-finite cell '" + cell + "'");
    return value;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

Eigen::MatrixXd read_numeric_csv(const fs::path& path, const std::vector<std::string>& expected_header,
                                 const std::string& context) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string() + " (" + context + ")");
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + " (" + context + "): empty file");
    const auto header = split_csv_line(line);
    if (header != expected_header) {
        std::string want;
        for (std::size_t i = 0; i < expected_header.size(); ++i) {
            want += (i ? "," : "") + expected_header[i];
        }
        throw DataError(path.string() + " (" + context + "): header '" + line + "' does not match expected '" +
                        want + "'");
    }
    const auto cols = static_cast<Index>(expected_header.size());
    std::vector<double> data;
    Index rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        const std::string where = path.string() + " row " + std::to_string(rows + 1) + " (" + context + ")";
        if (static_cast<Index>(cells.size()) != cols) {
            throw DataError(where + ": expected " + std::to_string(cols) + " values, found " +
                            std::to_string(cells.size()));
        }
        for (const auto& c : cells) data.push_back(parse_double(c, where));
        ++rows;
    }
    Eigen::MatrixXd out(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) out(r, c) = data[static_cast<std::size_t>(r * cols + c)];
    }
    return out;
}

void write_numeric_csv(const fs::path& path, const std::vector<std::string>& header,
                       const Eigen::MatrixXd& values) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (Index r = 0; r < values.rows(); ++r) {
        for (Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
        out << '\n';
    }
    if (!out) throw DataError("write failed for " + path.string());
}

namespace {

std::vector<std::string> feature_header(Index dim) {
    std::vector<std::string> h;
    for (Index i = 0; i < dim; ++i) h.push_back("f" + std::to_string(i));
    return h;
}

const std::vector<std::string> kLabelHeader = {"arousal", "valence"};

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw DataError(where + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(where + ": bad value for '" + key + "': " + e.what());
    }
}

}  // namespace

MultimodalDataset load_dataset(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw DataError("cannot open manifest " + manifest_path.string());
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("manifest " + manifest_path.string() + ": " + e.what());
    }
    const std::string where = "manifest " + manifest_path.string();
    const fs::path base = manifest_path.parent_path();
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : base / path;
    };

    const double rate = require<double>(manifest, "frame_rate_hz", where);
    std::vector<GroupSpec> schema;
    for (const auto& g : require<json>(manifest, "groups", where)) {
        GroupSpec spec;
        spec.name = require<std::string>(g, "name", where);
        spec.modality = parse_modality(require<std::string>(g, "modality", where));
        spec.dim = require<Index>(g, "dim", where);
        if (spec.dim <= 0) throw DataError(where + ": group '" + spec.name + "' has non-positive dim");
        schema.push_back(spec);
    }

    std::vector<PersonRecord> persons;
    for (const auto& pj : require<json>(manifest, "persons", where)) {
        PersonRecord person;
        person.id = require<std::string>(pj, "id", where);
        const std::string pwhere = where + ", person '" + person.id + "'";
        const auto files = require<json>(pj, "files", pwhere);
        if (files.size() != schema.size()) {
            throw DataError(pwhere + ": schema mismatch, " + std::to_string(files.size()) +
                            " group files for " + std::to_string(schema.size()) + " schema groups");
        }
        for (const auto& spec : schema) {
            if (!files.contains(spec.name)) {
                throw DataError(pwhere + ": schema mismatch, missing group '" + spec.name + "'");
            }
            const auto path = resolve(files.at(spec.name).get<std::string>());
            FeatureGroup group{spec.name, spec.modality,
                               read_numeric_csv(path, feature_header(spec.dim),
                                                "person " + person.id + ", group " + spec.name)};
            person.groups.push_back(std::move(group));
        }
        person.labels = read_numeric_csv(resolve(require<std::string>(pj, "labels", pwhere)), kLabelHeader,
                                         "person " + person.id + ", labels");
        persons.push_back(std::move(person));
    }
    return MultimodalDataset(std::move(schema), std::move(persons), rate);
}

fs::path write_dataset(const MultimodalDataset& dataset, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());

    json manifest;
    manifest["frame_rate_hz"] = dataset.frame_rate_hz();
    manifest["groups"] = json::array();
    for (const auto& g : dataset.schema()) {
        manifest["groups"].push_back({{"name", g.name}, {"modality", to_string(g.modality)}, {"dim", g.dim}});
    }
    manifest["persons"] = json::array();
    for (const auto& p : dataset.persons()) {
        fs::create_directories(dir / p.id, ec);
        if (ec) throw DataError("cannot create directory " + (dir / p.id).string() + ": " + ec.message());
        json files = json::object();
        for (const auto& g : p.groups) {
            const std::string rel = p.id + "/" + g.name + ".csv";
            write_numeric_csv(dir / rel, feature_header(g.dim()), g.values);
            files[g.name] = rel;
        }
        const std::string labels = p.id + "/labels.csv";
        write_numeric_csv(dir / labels, kLabelHeader, p.labels);
        manifest["persons"].push_back({{"id", p.id}, {"files", files}, {"labels", labels}});
    }
    const fs::path manifest_path = dir / "manifest.json";
    std::ofstream out(manifest_path);
    if (!out) throw DataError("cannot write " + manifest_path.string());
    out << manifest.dump(2) << '\n';
    return manifest_path;
}

}  // namespace mmdes
