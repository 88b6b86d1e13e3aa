#include "skycast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "skycast/errors.hpp"
#include "skycast/model_io.hpp"
#include "skycast/plot.hpp"

namespace skycast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v, const char* spec = "%.12g") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

DataBundle load_data(const RunConfig& cfg) {
    cfg.validate();

    CsvSchema schema;
    schema.has_clearsky = cfg.schema_has_clearsky;
    IngestResult in = ingest_csv(cfg.input, schema);

    DataBundle data;
    data.ghi = std::move(in.ghi);
    if (cfg.interpolate_gaps) {
        data.ghi = interpolate_short_gaps(data.ghi, cfg.max_gap_hours);
    }

    if (cfg.clearsky_source == ClearSkySource::Column) {
        if (!in.clearsky) {
            throw SchemaError("clearsky_source=column but the input has no clearsky column");
        }
        data.clearsky = std::move(*in.clearsky);
    } else {
        data.clearsky = clear_sky_series(cfg.site, cfg.solis, data.ghi.timestamps);
    }

    data.index = compute_clear_sky_index(data.ghi, data.clearsky, cfg.daytime_threshold);
    return data;
}

DataBundle slice_range(const DataBundle& data, const TimeRange& range) {
    DataBundle out;
    for (std::size_t i = 0; i < data.ghi.size(); ++i) {
        const Timestamp t = data.ghi.timestamps[i];
        if (!range.contains(t)) continue;
        out.ghi.timestamps.push_back(t);
        out.ghi.values.push_back(data.ghi.values[i]);
        out.clearsky.timestamps.push_back(t);
        out.clearsky.values.push_back(data.clearsky.values[i]);
        out.index.timestamps.push_back(t);
        out.index.values.push_back(data.index.values[i]);
        out.index.valid.push_back(data.index.valid[i]);
    }
    return out;
}

FitOutcome run_fit(const RunConfig& cfg, std::ostream& log) {
    const DataBundle data = load_data(cfg);

    // Fail fast if either partition is unusable.
    const auto parts = split(data.index, cfg.split);
    const auto& train_index = parts.first;

    const auto runs = contiguous_runs(train_index, cfg.night_bridge);
    std::size_t n_train_valid = train_index.valid_count();
    log << "training samples: " << n_train_valid << " valid over " << runs.size()
        << " runs\n";

    ensure_dir(cfg.output_dir);
    FitOutcome out;

    // ---- linear member ----
    const auto grid = arma::grid_search(runs, cfg.arma_p_min, cfg.arma_p_max,
                                        cfg.arma_q_min, cfg.arma_q_max, {}, cfg.threads);
    out.arma_cells_attempted = grid.attempted;

    std::ostringstream sel;
    sel << "p,q,bic,sigma2,n_train,converged,ar_stationary,ma_invertible,error\n";
    for (const auto& cell : grid.cells) {
        sel << cell.spec.p << "," << cell.spec.q << ",";
        if (cell.model) {
            sel << fmt(cell.bic, "%.17g") << "," << fmt(cell.model->sigma2, "%.17g") << ","
                << cell.model->n_train << "," << (cell.model->converged ? "true" : "false")
                << "," << (cell.model->ar_stationary ? "true" : "false") << ","
                << (cell.model->ma_invertible ? "true" : "false") << ",";
        } else {
            sel << ",,,,,," << cell.error;
        }
        sel << "\n";
    }
    out.arma_selection_path = join_path(cfg.output_dir, "arma_selection.csv");
    write_text_file(out.arma_selection_path, sel.str());

    const auto& best_arma = *grid.best().model;
    out.arma_spec = best_arma.spec;
    out.arma_bic = grid.best().bic;
    out.arma_model_path = join_path(cfg.output_dir, "arma_model.txt");
    write_text_file(out.arma_model_path, serialize_model(best_arma, "arma"));

    std::size_t failed_cells = grid.attempted - grid.ranked.size();
    log << "arma grid: " << grid.attempted << " structures attempted, " << failed_cells
        << " failed; best " << best_arma.spec.label() << " bic=" << fmt(out.arma_bic, "%.5f")
        << "\n";
    if (!best_arma.ar_stationary) log << "warning: fitted AR polynomial is non-stationary\n";
    if (!best_arma.ma_invertible) log << "warning: fitted MA polynomial is non-invertible\n";

    // ---- nonlinear member ----
    nn::TrainOptions nn_opts;
    nn_opts.seed = cfg.nn_seed;
    const auto selection =
        nn::select_nn(runs, cfg.nn_lag_candidates, cfg.nn_hidden_candidates, nn_opts,
                      cfg.nn_bic_effective_params, cfg.threads);

    std::ostringstream nsel;
    nsel << "p,h,bic,sigma2,gamma_eff,n_train,converged,error\n";
    for (const auto& cand : selection.candidates) {
        nsel << cand.spec.p << "," << cand.spec.h << ",";
        if (cand.model) {
            nsel << fmt(cand.bic, "%.17g") << "," << fmt(cand.model->sigma2, "%.17g") << ","
                 << fmt(cand.model->gamma_eff, "%.17g") << "," << cand.model->n_train << ","
                 << (cand.model->converged ? "true" : "false") << ",";
        } else {
            nsel << ",,,,," << cand.error;
        }
        nsel << "\n";
    }
    out.nn_selection_path = join_path(cfg.output_dir, "nn_selection.csv");
    write_text_file(out.nn_selection_path, nsel.str());

    const auto& best_nn = *selection.best().model;
    out.nn_spec = best_nn.spec;
    out.nn_bic = selection.best().bic;
    out.nn_model_path = join_path(cfg.output_dir, "nn_model.txt");
    write_text_file(out.nn_model_path,
                    serialize_model(best_nn, "nn", cfg.nn_bic_effective_params));

    log << "nn selection: " << selection.candidates.size() << " candidates; best "
        << best_nn.spec.label() << " bic=" << fmt(out.nn_bic, "%.5f")
        << " gamma_eff=" << fmt(best_nn.gamma_eff, "%.2f") << "\n";
    if (best_nn.small_data_warning) {
        log << "warning: training set smaller than 10x the nn parameter count\n";
    }
    if (!best_nn.converged) log << "warning: nn training hit the iteration limit\n";

    return out;
}

ForecastOutcome run_forecast(const RunConfig& cfg,
                             std::vector<std::string> model_paths, std::ostream& log) {
    if (model_paths.empty()) {
        model_paths = {join_path(cfg.output_dir, "arma_model.txt"),
                       join_path(cfg.output_dir, "nn_model.txt")};
    }

    std::vector<LoadedModel> docs;
    docs.reserve(model_paths.size());
    for (const auto& path : model_paths) docs.push_back(load_model_file(path));

    for (const auto& doc : docs) {
        if (doc.bic_convention != kBicConventionPerObservation) {
            throw ConventionMismatch("model '" + doc.name + "' uses BIC convention '" +
                                     doc.bic_convention + "', expected '" +
                                     kBicConventionPerObservation + "'");
        }
    }

    std::vector<std::unique_ptr<ForecastMember>> members;
    std::vector<std::string> used_names;
    for (auto& doc : docs) {
        std::string name = doc.name;
        // keep record-stream column names unique
        while (std::find(used_names.begin(), used_names.end(), name) != used_names.end()) {
            name += "_";
        }
        used_names.push_back(name);
        if (doc.arma_model) {
            members.push_back(std::make_unique<ArmaMember>(name, std::move(*doc.arma_model)));
        } else {
            members.push_back(
                std::make_unique<NnMember>(name, std::move(*doc.nn_model), doc.bic));
        }
    }

    Committee committee = Committee::build(std::move(members));

    const DataBundle data = load_data(cfg);
    cfg.split.validate();
    const DataBundle test = slice_range(data, cfg.split.test);
    if (test.index.valid_count() == 0) {
        throw EmptyPartition("test range has no valid samples");
    }

    CommitteeRun run =
        run_committee(committee, test.index, test.clearsky, test.ghi, cfg.night_bridge);

    log << "committee members:";
    for (std::size_t k = 0; k < run.member_names.size(); ++k) {
        log << " " << run.member_names[k] << " (bic=" << fmt(run.member_bics[k], "%.5f")
            << ", pmp=" << fmt(run.pmps[k], "%.4f") << ")";
    }
    log << "\n";
    log << "scored " << run.n_scored << " targets, skipped " << run.n_skipped << "\n";

    ensure_dir(cfg.output_dir);
    ForecastOutcome out;
    out.records_path = join_path(cfg.output_dir, "forecast.csv");
    out.pmps = run.pmps;
    out.n_scored = run.n_scored;
    out.n_skipped = run.n_skipped;
    write_records_csv(out.records_path, run);
    return out;
}

void write_records_csv(std::ostream& out, const CommitteeRun& run) {
    out << "# skycast-forecast 1\n";
    out << "# members =";
    for (std::size_t k = 0; k < run.member_names.size(); ++k) {
        out << (k ? "," : " ") << run.member_names[k];
    }
    out << "\n";
    out << "# member_bics =";
    for (std::size_t k = 0; k < run.member_bics.size(); ++k) {
        out << (k ? "," : " ") << fmt(run.member_bics[k], "%.17g");
    }
    out << "\n";
    out << "# pmps =";
    for (std::size_t k = 0; k < run.pmps.size(); ++k) {
        out << (k ? "," : " ") << fmt(run.pmps[k], "%.17g");
    }
    out << "\n";
    out << "# mean_ghi_all = " << fmt(run.mean_ghi_all, "%.17g") << "\n";

    out << "timestamp,ghi_measured,ghi_clearsky,kcls_measured";
    for (const auto& name : run.member_names) out << ",member_" << name << "_kcls";
    out << ",committee_kcls,committee_ghi,flags\n";

    const auto cell = [](double v) { return std::isnan(v) ? std::string() : fmt(v); };
    for (const auto& rec : run.records) {
        out << format_iso8601(rec.timestamp) << "," << fmt(rec.ghi_measured) << ","
            << fmt(rec.ghi_clearsky) << "," << fmt(rec.kcls_measured);
        for (double mk : rec.member_kcls) out << "," << cell(mk);
        out << "," << cell(rec.committee_kcls) << "," << cell(rec.committee_ghi) << ","
            << to_string(rec.status) << "\n";
    }
}

void write_records_csv(const std::string& path, const CommitteeRun& run) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file '" + path + "'");
    write_records_csv(out, run);
}

CommitteeRun read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open records file '" + path + "'");

    CommitteeRun run;
    std::string line;
    std::size_t lineno = 0;
    bool saw_magic = false;
    bool saw_header = false;
    std::size_t k_members = 0;

    const auto parse_list = [&](const std::string& payload) {
        std::vector<double> vals;
        for (const auto& tok : split_csv_line(payload)) {
            if (tok.empty()) continue;
            vals.push_back(std::strtod(tok.c_str(), nullptr));
        }
        return vals;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        if (line[0] == '#') {
            const std::string body = line.substr(1);
            const auto eq = body.find('=');
            if (body.find("skycast-forecast") != std::string::npos) {
                saw_magic = true;
            } else if (eq != std::string::npos) {
                std::string key = body.substr(0, eq);
                std::string val = body.substr(eq + 1);
                key.erase(std::remove(key.begin(), key.end(), ' '), key.end());
                if (!val.empty() && val.front() == ' ') val.erase(val.begin());
                if (key == "members") {
                    for (const auto& tok : split_csv_line(val)) {
                        run.member_names.push_back(tok);
                    }
                    k_members = run.member_names.size();
                } else if (key == "member_bics") {
                    run.member_bics = parse_list(val);
                } else if (key == "pmps") {
                    run.pmps = parse_list(val);
                } else if (key == "mean_ghi_all") {
                    run.mean_ghi_all = std::strtod(val.c_str(), nullptr);
                }
            }
            continue;
        }

        if (!saw_header) {
            if (!saw_magic) throw DataError(path + ": not a skycast forecast stream");
            if (k_members == 0) throw DataError(path + ": missing '# members =' line");
            saw_header = true;  // column header row
            continue;
        }

        const auto fields = split_csv_line(line);
        if (fields.size() != 7 + k_members) {
            throw ParseError(path, lineno, "expected " + std::to_string(7 + k_members) +
                                               " fields, got " +
                                               std::to_string(fields.size()));
        }
        ForecastRecord rec;
        rec.timestamp = parse_iso8601(fields[0]);
        rec.ghi_measured = std::strtod(fields[1].c_str(), nullptr);
        rec.ghi_clearsky = std::strtod(fields[2].c_str(), nullptr);
        rec.kcls_measured = std::strtod(fields[3].c_str(), nullptr);
        for (std::size_t k = 0; k < k_members; ++k) {
            const std::string& f = fields[4 + k];
            rec.member_kcls.push_back(f.empty() ? kNaN : std::strtod(f.c_str(), nullptr));
        }
        const std::string& ck = fields[4 + k_members];
        const std::string& cg = fields[5 + k_members];
        rec.committee_kcls = ck.empty() ? kNaN : std::strtod(ck.c_str(), nullptr);
        rec.committee_ghi = cg.empty() ? kNaN : std::strtod(cg.c_str(), nullptr);
        rec.status = record_status_from_string(fields[6 + k_members]);
        if (rec.status == RecordStatus::Scored) ++run.n_scored;
        else ++run.n_skipped;
        run.records.push_back(std::move(rec));
    }

    if (!saw_header) throw DataError(path + ": no record rows found");
    return run;
}

EvaluateOutcome run_evaluate(const EvaluateArgs& args, std::ostream& log) {
    const CommitteeRun run = read_records_csv(args.records_path);
    EvaluateOutcome out;
    out.table = evaluate_run(run, args.options);

    ensure_dir(args.output_dir);
    out.metrics_text_path = join_path(args.output_dir, "metrics.txt");
    out.metrics_csv_path = join_path(args.output_dir, "metrics.csv");
    write_text_file(out.metrics_text_path, out.table.to_text());
    write_text_file(out.metrics_csv_path, out.table.to_csv());
    log << out.table.to_text();

    // Re-emit scored records with error columns appended; collect scatter data.
    const std::size_t k_members = run.member_names.size();
    std::ostringstream rec_csv;
    rec_csv << "timestamp,ghi_measured,ghi_clearsky,kcls_measured";
    for (const auto& n : run.member_names) rec_csv << "," << n << "_ghi," << n << "_error";
    rec_csv << ",committee_ghi,committee_error,persistence_ghi,persistence_error\n";

    std::vector<PlotSeries> scatter(k_members + 2);
    for (std::size_t k = 0; k < k_members; ++k) scatter[k].name = run.member_names[k];
    scatter[k_members].name = "committee";
    scatter[k_members + 1].name = "persistence";

    std::ostringstream scatter_csv;
    scatter_csv << "model,ghi_measured,ghi_forecast\n";

    for (std::size_t i = 1; i < run.records.size(); ++i) {
        const auto& rec = run.records[i];
        const auto& prev = run.records[i - 1];
        if (rec.status != RecordStatus::Scored) continue;
        if (prev.timestamp != rec.timestamp - kHourStep) continue;

        const double persistence =
            args.options.persistence_mode == PersistenceMode::Ghi
                ? prev.ghi_measured
                : reconstruct_ghi(prev.kcls_measured, rec.ghi_clearsky);

        rec_csv << format_iso8601(rec.timestamp) << "," << fmt(rec.ghi_measured) << ","
                << fmt(rec.ghi_clearsky) << "," << fmt(rec.kcls_measured);
        for (std::size_t k = 0; k < k_members; ++k) {
            const double f = reconstruct_ghi(rec.member_kcls[k], rec.ghi_clearsky);
            rec_csv << "," << fmt(f) << "," << fmt(f - rec.ghi_measured);
            scatter[k].x.push_back(rec.ghi_measured);
            scatter[k].y.push_back(f);
            scatter_csv << run.member_names[k] << "," << fmt(rec.ghi_measured) << ","
                        << fmt(f) << "\n";
        }
        rec_csv << "," << fmt(rec.committee_ghi) << ","
                << fmt(rec.committee_ghi - rec.ghi_measured) << "," << fmt(persistence)
                << "," << fmt(persistence - rec.ghi_measured) << "\n";
        scatter[k_members].x.push_back(rec.ghi_measured);
        scatter[k_members].y.push_back(rec.committee_ghi);
        scatter[k_members + 1].x.push_back(rec.ghi_measured);
        scatter[k_members + 1].y.push_back(persistence);
        scatter_csv << "committee," << fmt(rec.ghi_measured) << ","
                    << fmt(rec.committee_ghi) << "\n";
        scatter_csv << "persistence," << fmt(rec.ghi_measured) << "," << fmt(persistence)
                    << "\n";
    }

    out.scored_records_path = join_path(args.output_dir, "scored_records.csv");
    write_text_file(out.scored_records_path, rec_csv.str());
    out.scatter_csv_path = join_path(args.output_dir, "scatter.csv");
    write_text_file(out.scatter_csv_path, scatter_csv.str());
    out.scatter_svg_path = join_path(args.output_dir, "scatter.svg");
    write_text_file(out.scatter_svg_path,
                    scatter_svg("Measured vs forecast GHI", "measured GHI [Wh/m2]",
                                "forecast GHI [Wh/m2]", scatter));

    if (args.window_start) {
        const Timestamp w0 = *args.window_start;
        const Timestamp w1 = w0 + static_cast<Timestamp>(args.window_hours) * kHourStep;

        std::ostringstream wcsv;
        wcsv << "timestamp,ghi_measured,committee_ghi,persistence_ghi\n";
        PlotSeries measured{"measured", {}, {}};
        PlotSeries committee{"committee", {}, {}};
        PlotSeries persistence_s{"persistence", {}, {}};

        std::size_t rows = 0;
        for (std::size_t i = 0; i < run.records.size(); ++i) {
            const auto& rec = run.records[i];
            if (rec.timestamp < w0 || rec.timestamp >= w1) continue;
            const double hours =
                static_cast<double>(rec.timestamp - w0) / static_cast<double>(kHourStep);
            double pers = kNaN;
            if (i > 0 && run.records[i - 1].timestamp == rec.timestamp - kHourStep) {
                pers = args.options.persistence_mode == PersistenceMode::Ghi
                           ? run.records[i - 1].ghi_measured
                           : reconstruct_ghi(run.records[i - 1].kcls_measured,
                                             rec.ghi_clearsky);
            }
            wcsv << format_iso8601(rec.timestamp) << "," << fmt(rec.ghi_measured) << ","
                 << (std::isnan(rec.committee_ghi) ? std::string() : fmt(rec.committee_ghi))
                 << "," << (std::isnan(pers) ? std::string() : fmt(pers)) << "\n";
            measured.x.push_back(hours);
            measured.y.push_back(rec.ghi_measured);
            committee.x.push_back(hours);
            committee.y.push_back(rec.committee_ghi);
            persistence_s.x.push_back(hours);
            persistence_s.y.push_back(pers);
            ++rows;
        }
        out.window_rows = rows;
        out.window_csv_path = join_path(args.output_dir, "window.csv");
        write_text_file(out.window_csv_path, wcsv.str());
        out.window_svg_path = join_path(args.output_dir, "window.svg");
        write_text_file(out.window_svg_path,
                        line_svg("Forecast vs measured GHI", "hours from window start",
                                 "GHI [Wh/m2]", {measured, committee, persistence_s}));
        log << "window rows: " << rows << " (daytime samples within " << args.window_hours
            << "h window)\n";
    }

    return out;
}

SynthOutcome run_synth(const SyntheticSpec& spec, const std::string& csv_path,
                       std::ostream& log) {
    const SynthResult r = generate(spec);

    const auto parent = std::filesystem::path(csv_path).parent_path();
    if (!parent.empty()) ensure_dir(parent.string());

    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw DataError("cannot open output file '" + csv_path + "'");
    write_series_csv(out, r.ghi, &r.clearsky);
    out.close();

    SynthOutcome o;
    o.csv_path = csv_path;
    o.sidecar_path = csv_path + ".meta";
    o.rows = r.ghi.size();
    write_text_file(o.sidecar_path, r.sidecar);
    log << "wrote " << o.rows << " rows to " << csv_path << "\n";
    return o;
}

}  // namespace skycast
