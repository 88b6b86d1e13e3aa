// Acceptance suite: one self-contained check per criterion, one PASS/FAIL
// line each. Returns the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "skycast/arma.hpp"
#include "skycast/committee.hpp"
#include "skycast/config.hpp"
#include "skycast/errors.hpp"
#include "skycast/metrics.hpp"
#include "skycast/mlp.hpp"
#include "skycast/pipeline.hpp"
#include "skycast/series.hpp"
#include "skycast/synth.hpp"

using namespace skycast;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::chrono::steady_clock::time_point g_last = std::chrono::steady_clock::now();

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    const auto now = std::chrono::steady_clock::now();
    const double secs =
        std::chrono::duration_cast<std::chrono::milliseconds>(now - g_last).count() / 1000.0;
    g_last = now;
    std::printf("[%s] %2d %-38s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::vector<SampleRun> single_run(std::vector<double> values) {
    std::vector<SampleRun> runs(1);
    runs[0].values = std::move(values);
    runs[0].index.resize(runs[0].values.size());
    return runs;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c, d);
    return buf;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("skycast_acceptance_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- 1: posterior-model-probability arithmetic anchor ----
void criterion_pmp_anchor() {
    const double bics[] = {-2.33, -2.59};
    const auto pmps = pmp_from_bics(bics);
    const double ea = std::exp(-bics[0] / 2.0);
    const double en = std::exp(-bics[1] / 2.0);

    const bool pass = std::fabs(pmps[0] - 0.4663) <= 0.002 &&
                      std::fabs(pmps[1] - 0.5337) <= 0.002 &&
                      std::fabs(ea - 3.20) <= 0.01 && std::fabs(en - 3.66) <= 0.01;
    report(1, "pmp arithmetic anchor", pass,
           fmt("pmps=(%.4f, %.4f) exp=(%.3f, %.3f)", pmps[0], pmps[1], ea, en));
}

// ---- 2: committee combination equation ----
void criterion_committee_equation() {
    const double pmps[] = {0.5337, 0.4663};
    const double fc[] = {0.8, 0.6};
    const double out = committee_forecast(pmps, fc);
    const double expected = 0.5337 * 0.8 + 0.4663 * 0.6;

    const double same[] = {0.9, 0.9};
    const double conv = committee_forecast(pmps, same);

    const bool pass = std::fabs(out - expected) <= 1e-12 && std::fabs(out - 0.70674) <= 1e-9 &&
                      std::fabs(conv - 0.9) <= 1e-12;
    report(2, "committee equation", pass, fmt("0.5337*0.8+0.4663*0.6 = %.10f", out));
}

// ---- 3: grid cardinality and parameter-count formula ----
void criterion_cardinality() {
    const auto y = simulate_arma({0.5, 0.3}, {}, 0.2, 0.1, 5000, 100);
    const auto grid = arma::grid_search(single_run(y), 1, 10, 0, 10);
    const int m = nn::MlpSpec{3, 12}.n_params();
    const bool pass = grid.attempted == 110 && m == 61;
    report(3, "grid cardinality / (p+2)h+1", pass,
           fmt("cells=%.0f nn(3,12) params=%.0f", double(grid.attempted), double(m)));
}

// ---- 4: AR(2) model-recovery over seeded replications ----
void criterion_ar2_recovery() {
    const int seeds = 20;
    int wins = 0;
    bool coef_ok = true;
    double worst_coef = 0.0;
    for (int s = 0; s < seeds; ++s) {
        const auto y = simulate_arma({0.5, 0.3}, {}, 0.2, 0.1, 5000, 1000 + s);
        const auto grid = arma::grid_search(single_run(y), 1, 10, 0, 10);
        const auto& best = grid.best();
        if (best.spec.p == 2 && best.spec.q == 0) {
            ++wins;
            const auto& m = *best.model;
            worst_coef = std::max({worst_coef, std::fabs(m.phi[0] - 0.5),
                                   std::fabs(m.phi[1] - 0.3), std::fabs(m.phi0 - 0.2)});
            if (worst_coef > 0.05) coef_ok = false;
        }
    }
    const bool pass = wins >= 18 && coef_ok;
    report(4, "ar(2) grid recovery", pass,
           fmt("wins=%.0f/20 worst coefficient error=%.4f", double(wins), worst_coef));
}

// ---- 5: reverse-mode gradient vs central finite differences ----
void criterion_gradient_check() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> uw(-2.0, 2.0);
    std::uniform_real_distribution<double> ux(-1.5, 1.5);
    std::uniform_real_distribution<double> ureg(0.1, 5.0);
    std::uniform_int_distribution<int> up(1, 4), uh(1, 4), un(5, 20);

    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        const nn::MlpSpec spec{up(rng), uh(rng)};
        nn::MlpModel model;
        model.spec = spec;
        model.scaling.mean.assign(spec.p, 0.0);
        model.scaling.stddev.assign(spec.p, 1.0);
        model.reg_alpha = ureg(rng);
        model.reg_beta = ureg(rng);
        model.weights.resize(spec.n_params());
        for (auto& w : model.weights) w = uw(rng);

        nn::TrainingSet batch;
        batch.p = spec.p;
        const int n = un(rng);
        for (int k = 0; k < n; ++k) {
            for (int i = 0; i < spec.p; ++i) batch.inputs.push_back(ux(rng));
            batch.targets.push_back(ux(rng));
        }

        const auto lg = nn::loss_and_gradient(model, batch);
        for (int j = 0; j < spec.n_params(); ++j) {
            const double h = 1e-6;
            auto plus = model, minus = model;
            plus.weights[j] += h;
            minus.weights[j] -= h;
            const double fd = (nn::loss_and_gradient(plus, batch).loss -
                               nn::loss_and_gradient(minus, batch).loss) /
                              (2 * h);
            worst = std::max(worst, std::fabs(lg.grad[j] - fd) /
                                        std::max({1.0, std::fabs(fd), std::fabs(lg.grad[j])}));
        }
    }
    report(5, "nn gradient vs finite differences", worst < 1e-5,
           fmt("max relative error = %.2e", worst));
}

// ---- 6: teacher-student training oracle ----
void criterion_teacher_student() {
    nn::MlpModel teacher;
    teacher.spec = {2, 2};
    teacher.scaling.mean = {0.0, 0.0};
    teacher.scaling.stddev = {1.0, 1.0};
    teacher.weights = {0.1, 0.8, -0.6, 0.2, -0.3, 1.2, -0.7, 0.5, 0.9};

    const double noise = 0.01;
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    std::normal_distribution<double> eps(0.0, noise);

    nn::TrainingSet train, fresh;
    train.p = fresh.p = 2;
    for (int k = 0; k < 2000; ++k) {
        const std::vector<double> lags = {ux(rng), ux(rng)};
        train.inputs.insert(train.inputs.end(), lags.begin(), lags.end());
        train.targets.push_back(teacher.forward(lags) + eps(rng));
    }
    for (int k = 0; k < 1000; ++k) {
        const std::vector<double> lags = {ux(rng), ux(rng)};
        fresh.inputs.insert(fresh.inputs.end(), lags.begin(), lags.end());
        fresh.targets.push_back(teacher.forward(lags));
    }

    nn::TrainOptions opts;
    opts.seed = 7;
    const auto model = nn::train_bayes_reg(train, {2, 4}, opts);

    double sse = 0.0;
    for (std::size_t k = 0; k < fresh.size(); ++k) {
        const std::vector<double> lags = {fresh.inputs[2 * k], fresh.inputs[2 * k + 1]};
        const double d = model.forward(lags) - fresh.targets[k];
        sse += d * d;
    }
    const double rmse_fresh = std::sqrt(sse / static_cast<double>(fresh.size()));
    report(6, "nn teacher-student oracle", rmse_fresh <= 2 * noise,
           fmt("fresh rmse=%.5f vs bound %.5f", rmse_fresh, 2 * noise));
}

// ---- 7: clear-sky-index transform round trip ----
void criterion_round_trip() {
    std::mt19937_64 rng(7777);
    std::uniform_real_distribution<double> uk(0.0, 1.3);
    std::uniform_real_distribution<double> ucls(0.0, 1100.0);
    std::uniform_real_distribution<double> unear(19.0, 21.0);

    const std::size_t n = 20000;
    IrradianceSeries ghi;
    ClearSkySeries cls;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = (i % 5 == 0) ? unear(rng) : ucls(rng);
        ghi.timestamps.push_back(static_cast<Timestamp>(i) * kHourStep);
        cls.timestamps.push_back(static_cast<Timestamp>(i) * kHourStep);
        cls.values.push_back(c);
        ghi.values.push_back(uk(rng) * c);
    }
    const auto idx = compute_clear_sky_index(ghi, cls, 20.0);

    double worst = 0.0;
    std::size_t checked = 0;
    bool finite_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!idx.valid[i]) continue;
        if (!std::isfinite(idx.values[i])) finite_ok = false;
        const double back = reconstruct_ghi(idx.values[i], cls.values[i]);
        const double denom = std::max(std::fabs(ghi.values[i]), 1e-300);
        worst = std::max(worst, std::fabs(back - ghi.values[i]) / denom);
        ++checked;
    }
    report(7, "transform round trip", finite_ok && worst <= 1e-9 && checked > n / 2,
           fmt("max relative error = %.2e over %.0f samples", worst, double(checked)));
}

// ---- 8: end-to-end improvement on a synthetic two-year fixture ----
void criterion_end_to_end() {
    const auto dir = fresh_dir("e2e");

    SyntheticSpec spec;
    spec.kind = SynthKind::CloudyClearSky;
    spec.n = 2 * 8760;  // 1998 + 1999, both non-leap
    spec.seed = 17;
    spec.start = parse_iso8601("1998-01-01T00:00");
    spec.site = {41.92, 8.73};
    spec.k_mean = 0.75;
    spec.k_phi = 0.9;
    spec.k_sigma = 0.12;

    std::ostringstream sink;
    run_synth(spec, (dir / "input.csv").string(), sink);

    RunConfig cfg;
    cfg.input = (dir / "input.csv").string();
    cfg.output_dir = (dir / "out").string();
    cfg.schema_has_clearsky = true;
    cfg.clearsky_source = ClearSkySource::Column;
    cfg.split.train = {parse_iso8601("1998-01-01T00:00"), parse_iso8601("1999-01-01T00:00")};
    cfg.split.test = {parse_iso8601("1999-01-01T00:00"), parse_iso8601("2000-01-01T00:00")};
    cfg.arma_p_max = 3;
    cfg.arma_q_max = 1;
    cfg.nn_lag_candidates = {2, 3};
    cfg.nn_hidden_candidates = {4};
    cfg.nn_seed = 29;

    run_fit(cfg, sink);
    const auto fc = run_forecast(cfg, {}, sink);

    EvaluateArgs ev;
    ev.records_path = fc.records_path;
    ev.output_dir = (dir / "eval").string();
    ev.options.persistence_mode = PersistenceMode::Ghi;
    const auto evo = run_evaluate(ev, sink);

    double arma_n = 0, nn_n = 0, committee_n = 0, persistence_n = 0;
    for (const auto& row : evo.table.rows) {
        if (row.name == "arma") arma_n = row.eval.nrmse_pct;
        else if (row.name == "nn") nn_n = row.eval.nrmse_pct;
        else if (row.name == "committee") committee_n = row.eval.nrmse_pct;
        else if (row.name == "persistence") persistence_n = row.eval.nrmse_pct;
    }

    const bool pass = committee_n <= std::min(arma_n, nn_n) + 0.3 &&
                      committee_n < persistence_n;
    report(8, "end-to-end committee improvement", pass,
           fmt("nrmse%%: arma=%.2f nn=%.2f committee=%.2f persistence=%.2f", arma_n, nn_n,
               committee_n, persistence_n));
}

// ---- 9: metric identities ----
void criterion_metric_identities() {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(0.0, 900.0);

    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        std::vector<double> f(48), m(48);
        for (auto& v : f) v = u(rng);
        for (auto& v : m) v = u(rng);
        const double r = rmse(f, m);
        const double b = mbe(f, m);
        if (!(r * r >= b * b - 1e-9)) ok = false;
        const double n200 = nrmse(f, m, 200.0);
        const double n400 = nrmse(f, m, 400.0);
        if (std::fabs(n200 - 2.0 * n400) > 1e-9 * n200) ok = false;
        if (rmse(m, m) != 0.0 || mbe(m, m) != 0.0) ok = false;
    }
    report(9, "metric identities", ok, ok ? "rmse^2>=mbe^2, inverse scaling, zero rows" : "violated");
}

// ---- 10: byte-identical reruns of the whole pipeline ----
void criterion_determinism() {
    const auto once = [&](const fs::path& dir) {
        SyntheticSpec spec;
        spec.kind = SynthKind::Ar;
        spec.n = 2200;
        spec.seed = 20;
        spec.phi = {0.75};
        spec.intercept = 0.25;
        spec.noise_sigma = 0.08;
        spec.start = parse_iso8601("1998-01-01T00:00");
        std::ostringstream sink;
        run_synth(spec, (dir / "input.csv").string(), sink);

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
        cfg.nn_lag_candidates = {1, 2};
        cfg.nn_hidden_candidates = {3};
        cfg.nn_seed = 11;

        run_fit(cfg, sink);
        const auto fc = run_forecast(cfg, {}, sink);
        EvaluateArgs ev;
        ev.records_path = fc.records_path;
        ev.output_dir = (dir / "eval").string();
        ev.window_start = cfg.split.test.begin + 24 * kHourStep;
        run_evaluate(ev, sink);
    };

    const auto dir1 = fresh_dir("det1");
    const auto dir2 = fresh_dir("det2");
    once(dir1);
    once(dir2);

    bool identical = true;
    std::size_t compared = 0;
    std::string first_diff;
    for (auto& entry : fs::recursive_directory_iterator(dir1)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), dir1);
        const auto other = dir2 / rel;
        ++compared;
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
            identical = false;
            if (first_diff.empty()) first_diff = rel.string();
        }
    }
    report(10, "pipeline determinism", identical && compared >= 10,
           identical ? fmt("%.0f files byte-identical", double(compared))
                     : "differs: " + first_diff);
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    try {
        criterion_pmp_anchor();
        criterion_committee_equation();
        criterion_cardinality();
        criterion_ar2_recovery();
        criterion_gradient_check();
        criterion_teacher_student();
        criterion_round_trip();
        criterion_end_to_end();
        criterion_metric_identities();
        criterion_determinism();
    } catch (const Error& e) {
        std::printf("[FAIL] -- suite aborted: %s\n", e.what());
        ++g_failures;
    }

    const auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(clock::now() - t0).count();
    std::printf("%d/10 criteria passed in %llds\n", 10 - g_failures,
                static_cast<long long>(secs));
    return g_failures;
}
