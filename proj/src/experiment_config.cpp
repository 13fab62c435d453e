#include "mmdes/experiment_config.hpp"

#include "mmdes/error.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace mmdes {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<ImputationMode> ExperimentConfig::default_scenarios() {
    return {ImputationMode::none(), ImputationMode::zero(Modality::Audio), ImputationMode::zero(Modality::Video),
            ImputationMode::mean(Modality::Audio), ImputationMode::mean(Modality::Video)};
}

void ExperimentConfig::validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (scenarios.empty()) throw ConfigError("scenario list must be nonempty");
    if (targets.empty()) throw ConfigError("target list must be nonempty");
    std::set<std::string> seen;
    for (const auto& s : scenarios) {
        if (!seen.insert(s.label()).second) throw ConfigError("duplicate scenario '" + s.label() + "'");
    }
    if (k < 1) throw ConfigError("k must be >= 1");
    if (context_len < 1) throw ConfigError("context_len must be >= 1");
    if (knn_context_len < 1 || knn_context_len > context_len) {
        throw ConfigError("knn_context_len must lie in [1, context_len]");
    }
    if (!(ridge_lambda >= 0.0)) throw ConfigError("ridge_lambda must be >= 0");
    if (meta.window_len < 2) throw ConfigError("meta.window_len must be >= 2");
    if (meta.epochs < 0 || !(meta.learning_rate > 0.0)) throw ConfigError("meta epochs/learning_rate invalid");
    if (test_persons < 1 || val_persons < 1) throw ConfigError("test_persons and val_persons must be >= 1");
    const auto& ca = cross_attention;
    if (ca.enabled && (ca.clips < 1 || ca.clip_len < 1 || ca.train_stride < 1 || ca.epochs < 0 ||
                       !(ca.learning_rate > 0.0))) {
        throw ConfigError("cross_attention settings invalid");
    }
    if (source.kind != SourceKind::Synthetic && source.manifest.empty()) {
        throw ConfigError("source.manifest is required for manifest and predictions sources");
    }
    if (source.kind == SourceKind::Predictions) {
        for (Target t : targets) {
            const auto it = source.predictions.find(t);
            if (it == source.predictions.end()) {
                throw ConfigError("source.predictions has no entry for " + std::string(to_string(t)));
            }
            for (const auto& s : scenarios) {
                if (!it->second.contains(s.label())) {
                    throw ConfigError("source.predictions." + std::string(to_string(t)) + " has no CSV for scenario '" +
                                      s.label() + "'");
                }
            }
            if (!it->second.contains("none")) {
                throw ConfigError("source.predictions." + std::string(to_string(t)) + " needs a 'none' CSV");
            }
        }
    }
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + (where.empty() ? std::string(key) : where + "." + key) +
                          "' has the wrong type");
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

ExperimentConfig config_from_json(const json& j, const fs::path& base_dir) {
    reject_unknown(j,
                   {"source", "repetitions", "test_persons", "val_persons", "k", "context_len", "knn_context_len",
                    "metric", "ridge_lambda", "dws_threshold", "meta", "cross_attention", "scenarios", "targets",
                    "seed", "impute_validation"},
                   "");
    ExperimentConfig c;

    if (j.contains("source")) {
        const json& s = j.at("source");
        reject_unknown(s,
                       {"kind", "persons", "frames", "noise", "cross_informativeness", "frame_rate_hz", "groups",
                        "manifest", "predictions"},
                       "source");
        std::string kind = "synthetic";
        read(s, "kind", kind, "source");
        if (kind == "synthetic") {
            c.source.kind = SourceKind::Synthetic;
        } else if (kind == "manifest") {
            c.source.kind = SourceKind::Manifest;
        } else if (kind == "predictions") {
            c.source.kind = SourceKind::Predictions;
        } else {
            throw ConfigError("config key 'source.kind' must be synthetic, manifest or predictions");
        }
        auto& syn = c.source.synthetic;
        read(s, "persons", syn.persons, "source");
        read(s, "frames", syn.frames, "source");
        read(s, "noise", syn.noise, "source");
        read(s, "cross_informativeness", syn.cross_informativeness, "source");
        read(s, "frame_rate_hz", syn.frame_rate_hz, "source");
        if (s.contains("groups")) {
            syn.groups.clear();
            for (const auto& g : s.at("groups")) {
                reject_unknown(g, {"name", "modality", "dim"}, "source.groups[]");
                GroupSpec spec;
                read(g, "name", spec.name, "source.groups[]");
                std::string modality;
                read(g, "modality", modality, "source.groups[]");
                try {
                    spec.modality = parse_modality(modality);
                } catch (const DataError& e) {
                    throw ConfigError(std::string("config key 'source.groups[].modality': ") + e.what());
                }
                read(g, "dim", spec.dim, "source.groups[]");
                syn.groups.push_back(spec);
            }
        }
        if (s.contains("manifest")) {
            std::string m;
            read(s, "manifest", m, "source");
            c.source.manifest = resolve(base_dir, m);
        }
        if (s.contains("predictions")) {
            const json& p = s.at("predictions");
            reject_unknown(p, {"arousal", "valence"}, "source.predictions");
            for (const auto& [target_name, files] : p.items()) {
                const Target t = parse_target(target_name);
                if (!files.is_object()) throw ConfigError("source.predictions." + target_name + " must be an object");
                for (const auto& [scenario, path] : files.items()) {
                    ImputationMode::parse(scenario);
                    if (!path.is_string()) {
                        throw ConfigError("config key 'source.predictions." + target_name + "." + scenario +
                                          "' must be a path");
                    }
                    c.source.predictions[t][scenario] = resolve(base_dir, path.get<std::string>());
                }
            }
        }
    }

    read(j, "repetitions", c.repetitions, "");
    read(j, "test_persons", c.test_persons, "");
    read(j, "val_persons", c.val_persons, "");
    read(j, "k", c.k, "");
    read(j, "context_len", c.context_len, "");
    read(j, "knn_context_len", c.knn_context_len, "");
    if (j.contains("metric")) {
        std::string m;
        read(j, "metric", m, "");
        c.metric = parse_metric(m);
    }
    read(j, "ridge_lambda", c.ridge_lambda, "");
    if (j.contains("dws_threshold")) {
        const json& t = j.at("dws_threshold");
        if (t.is_string() && t.get<std::string>() == "pool_mean") {
            c.dws_threshold = DwsThreshold::pool_mean();
        } else if (t.is_string() && t.get<std::string>() == "infinity") {
            c.dws_threshold = DwsThreshold::infinite();
        } else if (t.is_number()) {
            c.dws_threshold = DwsThreshold::absolute(t.get<double>());
        } else {
            throw ConfigError("config key 'dws_threshold' must be \"pool_mean\", \"infinity\" or a number");
        }
    }
    if (j.contains("meta")) {
        const json& m = j.at("meta");
        reject_unknown(m, {"window_len", "epochs", "learning_rate", "mode"}, "meta");
        read(m, "window_len", c.meta.window_len, "meta");
        read(m, "epochs", c.meta.epochs, "meta");
        read(m, "learning_rate", c.meta.learning_rate, "meta");
        if (m.contains("mode")) {
            std::string mode;
            read(m, "mode", mode, "meta");
            c.meta_mode = parse_meta_mode(mode);
        }
    }
    if (j.contains("cross_attention")) {
        const json& x = j.at("cross_attention");
        reject_unknown(x, {"enabled", "clips", "clip_len", "train_stride", "learning_rate", "epochs"},
                       "cross_attention");
        auto& ca = c.cross_attention;
        read(x, "enabled", ca.enabled, "cross_attention");
        read(x, "clips", ca.clips, "cross_attention");
        read(x, "clip_len", ca.clip_len, "cross_attention");
        read(x, "train_stride", ca.train_stride, "cross_attention");
        read(x, "learning_rate", ca.learning_rate, "cross_attention");
        read(x, "epochs", ca.epochs, "cross_attention");
    }
    if (j.contains("scenarios")) {
        std::vector<std::string> labels;
        read(j, "scenarios", labels, "");
        c.scenarios.clear();
        for (const auto& l : labels) c.scenarios.push_back(ImputationMode::parse(l));
    }
    if (j.contains("targets")) {
        std::vector<std::string> names;
        read(j, "targets", names, "");
        c.targets.clear();
        for (const auto& n : names) c.targets.push_back(parse_target(n));
    }
    read(j, "seed", c.seed, "");
    read(j, "impute_validation", c.impute_validation, "");
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    json s;
    switch (c.source.kind) {
        case SourceKind::Synthetic: {
            s["kind"] = "synthetic";
            const auto& syn = c.source.synthetic;
            s["persons"] = syn.persons;
            s["frames"] = syn.frames;
            s["noise"] = syn.noise;
            s["cross_informativeness"] = syn.cross_informativeness;
            s["frame_rate_hz"] = syn.frame_rate_hz;
            s["groups"] = json::array();
            for (const auto& g : syn.groups) {
                s["groups"].push_back({{"name", g.name}, {"modality", to_string(g.modality)}, {"dim", g.dim}});
            }
            break;
        }
        case SourceKind::Manifest:
            s["kind"] = "manifest";
            s["manifest"] = c.source.manifest.string();
            break;
        case SourceKind::Predictions: {
            s["kind"] = "predictions";
            s["manifest"] = c.source.manifest.string();
            json p = json::object();
            for (const auto& [t, files] : c.source.predictions) {
                for (const auto& [scenario, path] : files) p[std::string(to_string(t))][scenario] = path.string();
            }
            s["predictions"] = p;
            break;
        }
    }
    j["source"] = s;
    j["repetitions"] = c.repetitions;
    j["test_persons"] = c.test_persons;
    j["val_persons"] = c.val_persons;
    j["k"] = c.k;
    j["context_len"] = c.context_len;
    j["knn_context_len"] = c.knn_context_len;
    j["metric"] = to_string(c.metric);
    j["ridge_lambda"] = c.ridge_lambda;
    if (c.dws_threshold.kind == DwsThreshold::Kind::PoolMean) {
        j["dws_threshold"] = "pool_mean";
    } else if (std::isinf(c.dws_threshold.value)) {
        j["dws_threshold"] = "infinity";
    } else {
        j["dws_threshold"] = c.dws_threshold.value;
    }
    j["meta"] = {{"window_len", c.meta.window_len},
                 {"epochs", c.meta.epochs},
                 {"learning_rate", c.meta.learning_rate},
                 {"mode", to_string(c.meta_mode)}};
    const auto& ca = c.cross_attention;
    j["cross_attention"] = {{"enabled", ca.enabled},           {"clips", ca.clips},
                            {"clip_len", ca.clip_len},         {"train_stride", ca.train_stride},
                            {"learning_rate", ca.learning_rate}, {"epochs", ca.epochs}};
    j["scenarios"] = json::array();
    for (const auto& s2 : c.scenarios) j["scenarios"].push_back(s2.label());
    j["targets"] = json::array();
    for (Target t : c.targets) j["targets"].push_back(to_string(t));
    j["seed"] = c.seed;
    j["impute_validation"] = c.impute_validation;
    return j;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

}  // namespace mmdes
