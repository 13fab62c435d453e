#include "mmdes/harness.hpp"

#include "mmdes/dataset_io.hpp"
#include "mmdes/error.hpp"
#include "mmdes/metrics.hpp"
#include "mmdes/regressor_pool.hpp"
#include "mmdes/rng.hpp"
#include "mmdes/splits.hpp"
#include "mmdes/standardize.hpp"
#include "mmdes/windowing.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace mmdes {

namespace {

struct PreparedData {
    MultimodalDataset dataset;
    /// External pool predictions for the whole dataset, by target and scenario label.
    std::map<Target, std::map<std::string, PoolPredictions>> external;
    std::map<std::string, Index> row_offset;
};

PreparedData prepare(const ExperimentConfig& cfg) {
    switch (cfg.source.kind) {
        case SourceKind::Synthetic:
            return {generate_synthetic(cfg.source.synthetic, cfg.seed), {}, {}};
        case SourceKind::Manifest:
            return {load_dataset(cfg.source.manifest), {}, {}};
        case SourceKind::Predictions: {
            PreparedData data{load_dataset(cfg.source.manifest), {}, {}};
            Index offset = 0;
            for (const auto& p : data.dataset.persons()) {
                data.row_offset[p.id] = offset;
                offset += p.frames();
            }
            for (const auto& [target, files] : cfg.source.predictions) {
                for (const auto& [scenario, path] : files) {
                    PoolPredictions preds = load_predictions(path, offset);
                    if (preds.target != target) {
                        throw DataError(path.string() + ": sidecar declares target " +
                                        std::string(to_string(preds.target)) + ", config expects " +
                                        std::string(to_string(target)));
                    }
                    data.external[target][scenario] = std::move(preds);
                }
                const auto& reference = data.external[target].at("none");
                for (const auto& [scenario, preds] : data.external[target]) {
                    if (preds.names != reference.names || preds.modalities != reference.modalities) {
                        throw DataError("predictions for scenario '" + scenario + "' use a different column mapping");
                    }
                }
            }
            return data;
        }
    }
    throw ConfigError("unknown data source");
}

/// Rows of `all` belonging to `ids`, concatenated in order.
PoolPredictions slice_rows(const PoolPredictions& all, const std::vector<std::string>& ids,
                           const PreparedData& data) {
    PoolPredictions out;
    out.target = all.target;
    out.names = all.names;
    out.modalities = all.modalities;
    Index rows = 0;
    for (const auto& id : ids) rows += data.dataset.person(id).frames();
    out.values.resize(rows, all.pool_size());
    out.labels.resize(rows);
    Index at = 0;
    for (const auto& id : ids) {
        const Index n = data.dataset.person(id).frames();
        const Index from = data.row_offset.at(id);
        out.values.middleRows(at, n) = all.values.middleRows(from, n);
        out.labels.segment(at, n) = all.labels.segment(from, n);
        at += n;
    }
    return out;
}

double ccc_of(const Eigen::VectorXd& gold, const Eigen::VectorXd& pred) {
    return ccc({gold.data(), static_cast<std::size_t>(gold.size())},
               {pred.data(), static_cast<std::size_t>(pred.size())});
}

struct Prepared {
    FrameSamples samples;
    std::vector<PersonRecord> standardized;
};

/// What a scenario's competence estimates are computed from.
struct Competence {
    std::vector<ValidationErrorTable> tables;  // per target
    std::vector<MetaModel> meta;               // per target
    std::unique_ptr<NeighborIndex> index;
};

struct RepetitionResult {
    // ccc[target][scenario][method]
    std::vector<std::vector<std::vector<double>>> ccc;
    // pool_ccc[target][regressor]
    std::vector<std::vector<double>> pool_ccc;
    std::vector<std::vector<std::string>> pool_names;
    std::vector<std::vector<Modality>> pool_modalities;
    std::vector<std::string> diagnostics;
    std::string weights_csv;
};

class RepetitionRunner {
public:
    RepetitionRunner(const ExperimentConfig& cfg, const PreparedData& data, const SplitRepetition& split,
                     std::size_t rep, bool dump)
        : cfg_(cfg), data_(data), split_(split), rep_(rep), dump_(dump) {}

    RepetitionResult run();

private:
    std::vector<PersonRecord> collect(const std::vector<std::string>& ids) const {
        std::vector<PersonRecord> out;
        for (const auto& id : ids) out.push_back(data_.dataset.person(id));
        return out;
    }

    Prepared prepare_persons(const std::vector<PersonRecord>& raw, const ImputationMode& mode) const {
        Prepared p;
        std::vector<FrameSamples> parts;
        for (const auto& person : raw) {
            PersonRecord s = standardizer_->apply(apply_imputation(person, mode, *means_));
            parts.push_back(frame_samples(s, cfg_.context_len));
            p.standardized.push_back(std::move(s));
        }
        p.samples = concat(parts);
        return p;
    }

    PoolPredictions pool_predictions(std::size_t ti, const Prepared& persons, const std::vector<std::string>& ids,
                                     const ImputationMode& mode) const {
        if (cfg_.source.kind == SourceKind::Predictions) {
            const Target t = cfg_.targets[ti];
            PoolPredictions p = slice_rows(data_.external.at(t).at(mode.label()), ids, data_);
            p.labels = persons.samples.y.col(static_cast<Index>(t));
            return p;
        }
        return predict(pools_[ti], persons.samples);
    }

    Competence build_competence(const Prepared& val, const ImputationMode& mode) const;

    const ExperimentConfig& cfg_;
    const PreparedData& data_;
    const SplitRepetition& split_;
    std::size_t rep_;
    bool dump_;

    std::optional<ModalityMeans> means_;
    std::optional<Standardizer> standardizer_;
    std::vector<RegressorPool> pools_;
    std::vector<xatt::Params> cross_attention_;
};

Competence RepetitionRunner::build_competence(const Prepared& val, const ImputationMode& mode) const {
    Competence c;
    const Eigen::MatrixXd keys = neighbor_keys(val.samples, cfg_.knn_context_len);
    c.index = std::make_unique<NeighborIndex>(keys, cfg_.metric);
    for (std::size_t ti = 0; ti < cfg_.targets.size(); ++ti) {
        const PoolPredictions preds = pool_predictions(ti, val, split_.val_ids, mode);
        c.tables.push_back(build_validation_table(preds, keys));
        MetaTrainConfig meta_cfg = cfg_.meta;
        meta_cfg.seed = derive_seed(cfg_.seed, "meta", rep_ * 2 + static_cast<std::size_t>(cfg_.targets[ti]));
        c.meta.push_back(meta_train(preds.values, preds.labels, val.samples.segments, meta_cfg));
    }
    return c;
}

RepetitionResult RepetitionRunner::run() {
    const std::size_t T = cfg_.targets.size();
    const std::size_t S = cfg_.scenarios.size();
    const bool with_xatt = cfg_.cross_attention.enabled;
    const auto& methods = method_names(with_xatt);

    {
        std::set<std::string> heldout(split_.test_ids.begin(), split_.test_ids.end());
        for (const auto& id : split_.train_ids) {
            if (heldout.contains(id)) throw Error("test person '" + id + "' also in the training set");
        }
        for (const auto& id : split_.val_ids) {
            if (heldout.contains(id)) throw Error("test person '" + id + "' also in the validation set");
        }
    }

    const auto train_raw = collect(split_.train_ids);
    const auto val_raw = collect(split_.val_ids);
    const auto test_raw = collect(split_.test_ids);
    means_ = compute_means(train_raw);
    standardizer_ = Standardizer::fit(train_raw);

    const Prepared train = prepare_persons(train_raw, ImputationMode::none());
    const Prepared val = prepare_persons(val_raw, ImputationMode::none());

    RepetitionResult result;
    result.ccc.assign(T, std::vector<std::vector<double>>(S, std::vector<double>(methods.size(), 0.0)));

    if (cfg_.source.kind != SourceKind::Predictions) {
        for (Target t : cfg_.targets) pools_.push_back(train_pool(train.samples, t, cfg_.ridge_lambda));
    }

    const Competence base = build_competence(val, ImputationMode::none());
    for (std::size_t ti = 0; ti < T; ++ti) {
        const auto& table = base.tables[ti];
        std::vector<double> scores;
        for (Index i = 0; i < table.pool_size(); ++i) {
            scores.push_back(ccc_of(table.labels, table.predictions.col(i)));
        }
        result.pool_ccc.push_back(std::move(scores));
        const PoolPredictions names = pool_predictions(ti, val, split_.val_ids, ImputationMode::none());
        result.pool_names.push_back(names.names);
        result.pool_modalities.push_back(names.modalities);
        const std::string diag = base.meta[ti].diagnostic();
        if (!diag.empty()) {
            result.diagnostics.push_back("repetition " + std::to_string(rep_) + ", " +
                                         std::string(to_string(cfg_.targets[ti])) + ": " + diag);
        }
    }

    if (with_xatt) {
        const auto& ca = cfg_.cross_attention;
        for (Target t : cfg_.targets) {
            std::vector<xatt::Subsequence> data;
            for (const auto& p : train.standardized) {
                auto subs = xatt::subsequences(p, t, ca.clips, ca.clip_len, ca.train_stride);
                data.insert(data.end(), std::make_move_iterator(subs.begin()), std::make_move_iterator(subs.end()));
            }
            const xatt::ModalityTracks tracks = xatt::modality_tracks(train.standardized.front());
            const xatt::Dims dims{tracks.audio.rows(), tracks.video.rows(), ca.clips};
            const xatt::TrainConfig tc{ca.learning_rate, ca.epochs,
                                       derive_seed(cfg_.seed, "xatt", rep_ * 2 + static_cast<std::size_t>(t))};
            cross_attention_.push_back(xatt::train(data, dims, tc).params);
        }
    }

    std::ostringstream weights;
    for (std::size_t si = 0; si < S; ++si) {
        const ImputationMode& mode = cfg_.scenarios[si];
        try {
            const Prepared test = prepare_persons(test_raw, mode);
            std::optional<Competence> imputed;
            if (cfg_.impute_validation && mode.kind() != ImputationKind::None) {
                imputed = build_competence(prepare_persons(val_raw, mode), mode);
            }
            const Competence& comp = imputed ? *imputed : base;
            const Eigen::MatrixXd keys = neighbor_keys(test.samples, cfg_.knn_context_len);
            const Index frames = test.samples.size();

            std::vector<PoolPredictions> preds;
            std::vector<Eigen::MatrixXd> out;  // frames x methods, per target
            for (std::size_t ti = 0; ti < T; ++ti) {
                preds.push_back(pool_predictions(ti, test, split_.test_ids, mode));
                out.emplace_back(frames, 5);
            }

            std::vector<std::string> frame_person(static_cast<std::size_t>(frames));
            std::vector<Index> frame_index(static_cast<std::size_t>(frames));
            for (const auto& seg : test.samples.segments) {
                for (Index f = 0; f < seg.length; ++f) {
                    frame_person[static_cast<std::size_t>(seg.begin + f)] = seg.person_id;
                    frame_index[static_cast<std::size_t>(seg.begin + f)] = f;
                }
            }

            auto dump = [&](std::size_t ti, const char* method, Index f, const Eigen::VectorXd& alpha) {
                weights << rep_ << ',' << mode.label() << ',' << to_string(cfg_.targets[ti]) << ',' << method << ','
                        << frame_person[static_cast<std::size_t>(f)] << ',' << frame_index[static_cast<std::size_t>(f)];
                for (Index i = 0; i < alpha.size(); ++i) weights << ',' << format_double(alpha(i));
                weights << '\n';
            };

            for (Index f = 0; f < frames; ++f) {
                const std::vector<Neighbor> neighbors =
                    comp.index->query({keys.row(f).data(), static_cast<std::size_t>(keys.cols())}, cfg_.k);
                for (std::size_t ti = 0; ti < T; ++ti) {
                    const Eigen::VectorXd p = preds[ti].values.row(f).transpose();
                    const std::span<const double> ps(p.data(), static_cast<std::size_t>(p.size()));
                    const CompetenceRegion region = make_region(neighbors, comp.tables[ti]);
                    const Index chosen = ds_select(region);
                    const SelectionWeights dw = regressor_weights(region);
                    const SelectionWeights dws = dws_filter(region, cfg_.dws_threshold);
                    const SelectionWeights meta = meta_weights(comp.meta[ti], ps, cfg_.meta_mode);
                    auto row = out[ti].row(f);
                    row(0) = mean_combine(ps);
                    row(1) = p(chosen);
                    row(2) = dw_combine(ps, dw);
                    row(3) = dw_combine(ps, dws);
                    row(4) = dw_combine(ps, meta);
                    if (dump_) {
                        dump(ti, "DS", f, SelectionWeights::one_hot(p.size(), chosen).alpha);
                        dump(ti, "DW", f, dw.alpha);
                        dump(ti, "DWS", f, dws.alpha);
                        dump(ti, "Meta-DW", f, meta.alpha);
                    }
                }
            }

            for (std::size_t ti = 0; ti < T; ++ti) {
                const Eigen::VectorXd gold = test.samples.y.col(static_cast<Index>(cfg_.targets[ti]));
                for (Index m = 0; m < 5; ++m) {
                    result.ccc[ti][si][static_cast<std::size_t>(m)] = ccc_of(gold, out[ti].col(m));
                }
                if (with_xatt) {
                    std::vector<double> pred, ref;
                    for (const auto& person : test.standardized) {
                        const auto seq =
                            xatt::evaluate_sequence(cross_attention_[ti], person, cfg_.cross_attention.clip_len);
                        for (std::size_t i = 0; i < seq.end_frames.size(); ++i) {
                            pred.push_back(seq.predictions(static_cast<Index>(i)));
                            ref.push_back(person.labels(seq.end_frames[i], static_cast<Index>(cfg_.targets[ti])));
                        }
                    }
                    result.ccc[ti][si][5] = ccc(ref, pred);
                }
            }
        } catch (const Error& e) {
            throw Error("scenario " + mode.label() + ": " + e.what());
        }
    }
    result.weights_csv = weights.str();
    return result;
}

}  // namespace

EvaluationReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    const PreparedData data = prepare(config);
    const std::size_t test_count = config.test_persons;
    const std::size_t val_count = config.val_persons;
    const SplitPlan plan =
        make_split_plan(data.dataset.person_ids(), config.repetitions, derive_seed(config.seed, "splits"),
                        test_count, val_count);

    const std::size_t R = plan.repetitions.size();
    std::vector<std::optional<RepetitionResult>> results(R);
    std::vector<std::exception_ptr> failures(R);
    const bool dump = options.dump_weights.has_value();

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= R) return;
            try {
                try {
                    results[r] = RepetitionRunner(config, data, plan.repetitions[r], r, dump).run();
                } catch (const Error& e) {
                    throw Error("repetition " + std::to_string(r) + ", " + e.what());
                }
            } catch (...) {
                failures[r] = std::current_exception();
            }
            const std::size_t finished = done.fetch_add(1) + 1;
            if (options.progress) {
                std::lock_guard lock(progress_mutex);
                options.progress(finished, R);
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(R)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (unsigned i = 0; i < jobs; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    EvaluationReport report;
    report.config = config_to_json(config);
    report.targets = config.targets;
    for (const auto& s : config.scenarios) report.scenarios.push_back(s.label());
    report.methods = method_names(config.cross_attention.enabled);

    for (std::size_t ti = 0; ti < config.targets.size(); ++ti) {
        for (std::size_t si = 0; si < config.scenarios.size(); ++si) {
            for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
                ReportCell cell{config.targets[ti], report.scenarios[si], report.methods[mi], {}, 0.0, 0.0};
                for (const auto& r : results) cell.values.push_back(r->ccc[ti][si][mi]);
                cell.mean = mean_of(cell.values);
                cell.std = sample_std(cell.values);
                report.cells.push_back(std::move(cell));
            }
        }
        const auto& first = *results.front();
        for (std::size_t i = 0; i < first.pool_names[ti].size(); ++i) {
            RegressorScore score{config.targets[ti], first.pool_names[ti][i], first.pool_modalities[ti][i], {}};
            for (const auto& r : results) score.validation_ccc.push_back(r->pool_ccc[ti][i]);
            report.pool.push_back(std::move(score));
        }
    }
    for (const auto& r : results) {
        report.diagnostics.insert(report.diagnostics.end(), r->diagnostics.begin(), r->diagnostics.end());
    }

    if (dump) {
        std::ofstream out(*options.dump_weights);
        if (!out) throw DataError("cannot write " + options.dump_weights->string());
        out << "repetition,scenario,target,method,person_id,frame";
        const std::size_t n = results.front()->pool_names.front().size();
        for (std::size_t i = 0; i < n; ++i) out << ",alpha_" << i;
        out << '\n';
        for (const auto& r : results) out << r->weights_csv;
    }
    return report;
}

}  // namespace mmdes
