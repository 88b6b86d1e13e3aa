#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skycast/errors.hpp"
#include "skycast/pipeline.hpp"

using namespace skycast;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("skycast_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small_config(const fs::path& dir) {
    RunConfig cfg;
    cfg.input = (dir / "input.csv").string();
    cfg.output_dir = (dir / "out").string();
    cfg.schema_has_clearsky = true;
    cfg.clearsky_source = ClearSkySource::Column;
    cfg.split.train.begin = parse_iso8601("1998-01-01T00:00");
    cfg.split.train.end = cfg.split.train.begin + 1500 * kHourStep;
    cfg.split.test.begin = cfg.split.train.end;
    cfg.split.test.end = cfg.split.train.begin + 2200 * kHourStep;
    cfg.arma_p_max = 2;
    cfg.arma_q_max = 1;
    cfg.nn_lag_candidates = {1};
    cfg.nn_hidden_candidates = {2};
    cfg.nn_seed = 11;
    return cfg;
}

void make_fixture(const fs::path& dir) {
    SyntheticSpec spec;
    spec.kind = SynthKind::Ar;
    spec.n = 2200;
    spec.seed = 20;
    spec.phi = {0.5, 0.3};
    spec.intercept = 0.2;  // process mean 1.0
    spec.noise_sigma = 0.08;
    spec.start = parse_iso8601("1998-01-01T00:00");
    std::ostringstream sink;
    run_synth(spec, (dir / "input.csv").string(), sink);
}

}  // namespace

TEST_CASE("pipeline: synth -> fit -> forecast -> evaluate, closed loop") {
    const auto dir = fresh_dir("pipeline");
    make_fixture(dir);
    const auto cfg = small_config(dir);

    std::ostringstream log;
    const auto fit = run_fit(cfg, log);
    CHECK(fit.arma_cells_attempted == 4);  // p in {1,2} x q in {0,1}
    // one table row per attempted cell
    const std::string sel = slurp(fit.arma_selection_path);
    CHECK(std::count(sel.begin(), sel.end(), '\n') == 5);
    CHECK(fs::exists(fit.arma_model_path));
    CHECK(fs::exists(fit.nn_model_path));
    CHECK(fs::exists(fit.arma_selection_path));
    CHECK(fs::exists(fit.nn_selection_path));
    // the AR(2) generator wins the small grid for this seed
    CHECK(fit.arma_spec.p == 2);
    CHECK(fit.arma_spec.q == 0);
    CHECK(log.str().find("best arma(") != std::string::npos);

    const auto fc = run_forecast(cfg, {}, log);
    CHECK(fs::exists(fc.records_path));
    REQUIRE(fc.pmps.size() == 2);
    CHECK(fc.pmps[0] + fc.pmps[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fc.n_scored > 600);

    // the stream reloads identically
    const auto reloaded = read_records_csv(fc.records_path);
    CHECK(reloaded.member_names == std::vector<std::string>{"arma", "nn"});
    CHECK(reloaded.n_scored == fc.n_scored);
    std::ostringstream rewritten;
    write_records_csv(rewritten, reloaded);
    CHECK(rewritten.str() == slurp(fc.records_path));

    EvaluateArgs ev;
    ev.records_path = fc.records_path;
    ev.output_dir = (dir / "eval").string();
    ev.window_start = cfg.split.test.begin + 24 * kHourStep;
    ev.window_hours = 96;
    const auto evo = run_evaluate(ev, log);
    REQUIRE(evo.table.rows.size() == 4);  // arma, nn, committee, persistence
    CHECK(evo.table.rows[0].name == "arma");
    CHECK(evo.table.rows[1].name == "nn");
    CHECK(evo.table.rows[2].name == "committee");
    CHECK(evo.table.rows[3].name == "persistence");
    CHECK(evo.window_rows == 96);  // flat clear-sky fixture has no masked night
    for (const auto* path :
         {&evo.metrics_text_path, &evo.metrics_csv_path, &evo.scored_records_path,
          &evo.scatter_csv_path, &evo.scatter_svg_path, &evo.window_csv_path,
          &evo.window_svg_path}) {
        CHECK(fs::exists(*path));
    }

    // the committee should clearly beat naive persistence on this fixture
    CHECK(evo.table.rows[2].eval.rmse < evo.table.rows[3].eval.rmse);
}

TEST_CASE("pipeline: missing measurements mask targets instead of breaking runs") {
    const auto dir = fresh_dir("gaps");
    make_fixture(dir);

    // punch a 2-hour hole and a 5-hour hole into the file
    auto text = slurp(dir / "input.csv");
    std::istringstream in(text);
    std::ostringstream edited;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const bool short_gap = lineno >= 100 && lineno < 102;
        const bool long_gap = lineno >= 300 && lineno < 305;
        if (short_gap || long_gap) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            line = line.substr(0, c1 + 1) + line.substr(c2);  // empty ghi field
        }
        edited << line << "\n";
    }
    std::ofstream(dir / "input.csv", std::ios::binary) << edited.str();

    auto cfg = small_config(dir);
    std::ostringstream log;

    const auto plain = run_fit(cfg, log);
    CHECK(fs::exists(plain.arma_model_path));

    // with interpolation the 2-hour hole is filled, the 5-hour hole is not
    cfg.interpolate_gaps = true;
    const auto bundle = load_data(cfg);
    std::size_t missing = 0;
    for (double v : bundle.ghi.values) {
        if (std::isnan(v)) ++missing;
    }
    CHECK(missing == 5);
}

TEST_CASE("pipeline: forecast rejects mixed BIC conventions") {
    const auto dir = fresh_dir("convention");
    make_fixture(dir);
    const auto cfg = small_config(dir);
    std::ostringstream log;
    const auto fit = run_fit(cfg, log);

    std::string doc = slurp(fit.arma_model_path);
    const std::string tag = "bic_convention = per-observation";
    doc.replace(doc.find(tag), tag.size(), "bic_convention = total-likelihood");
    std::ofstream(fit.arma_model_path, std::ios::binary) << doc;

    CHECK_THROWS_AS(run_forecast(cfg, {}, log), ConventionMismatch);
}

TEST_CASE("pipeline: empty test partition is reported") {
    const auto dir = fresh_dir("emptytest");
    make_fixture(dir);
    auto cfg = small_config(dir);
    std::ostringstream log;
    run_fit(cfg, log);

    // move the test window beyond the data
    cfg.split.test.begin = parse_iso8601("2010-01-01T00:00");
    cfg.split.test.end = parse_iso8601("2011-01-01T00:00");
    CHECK_THROWS_AS(run_forecast(cfg, {}, log), EmptyPartition);
}

TEST_CASE("cli binary: exit codes and determinism") {
    const auto dir = fresh_dir("cli");
    const std::string exe = SKYCAST_CLI_PATH;

    const auto run = [&](const std::string& args) {
        const std::string cmd = exe + " " + args + " > " + (dir / "stdout.txt").string() +
                                " 2> " + (dir / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };

    CHECK(run("--print-default-config") == 0);
    CHECK(slurp(dir / "stdout.txt").find("daytime_threshold") != std::string::npos);

    // usage error
    CHECK(run("frobnicate") == 1);

    // config error: missing config file
    CHECK(run("fit --config " + (dir / "nope.cfg").string()) == 1);

    // data error: config is fine but the input file is absent
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "input = " << (dir / "missing.csv").string() << "\n"
            << "output_dir = " << (dir / "out").string() << "\n"
            << "train_begin = 1998-01-01T00:00\n"
            << "train_end = 1998-03-01T00:00\n"
            << "test_begin = 1998-03-01T00:00\n"
            << "test_end = 1998-04-01T00:00\n";
    }
    CHECK(run("fit --config " + (dir / "run.cfg").string()) == 2);
    CHECK(slurp(dir / "stderr.txt").find("missing.csv") != std::string::npos);

    // numerical failure: every grid cell is data-starved, nothing converges
    {
        std::ostringstream sink;
        SyntheticSpec tiny;
        tiny.kind = SynthKind::Ar;
        tiny.n = 700;
        tiny.seed = 4;
        tiny.start = parse_iso8601("1998-01-01T00:00");
        run_synth(tiny, (dir / "tiny.csv").string(), sink);
        std::ofstream cfg(dir / "starved.cfg");
        cfg << "input = " << (dir / "tiny.csv").string() << "\n"
            << "output_dir = " << (dir / "out2").string() << "\n"
            << "schema = timestamp,ghi,clearsky\n"
            << "clearsky_source = column\n"
            << "train_begin = 1998-01-01T00:00\n"
            << "train_end = 1998-01-21T00:00\n"
            << "test_begin = 1998-01-21T00:00\n"
            << "test_end = 1998-01-30T00:00\n"
            << "arma_p_min = 10\narma_p_max = 10\narma_q_min = 10\narma_q_max = 10\n";
    }
    CHECK(run("fit --config " + (dir / "starved.cfg").string()) == 3);

    // synth determinism through the binary
    const std::string synth_args = "synth --kind ar --n 200 --seed 5 --out ";
    CHECK(run(synth_args + (dir / "a.csv").string()) == 0);
    CHECK(run(synth_args + (dir / "b.csv").string()) == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}
