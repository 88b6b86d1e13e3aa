#include <benchmark/benchmark.h>

#include <numeric>
#include <sstream>
#include <vector>

#include "skycast/arma.hpp"
#include "skycast/clearsky.hpp"
#include "skycast/committee.hpp"
#include "skycast/csv.hpp"
#include "skycast/mlp.hpp"
#include "skycast/synth.hpp"

namespace {

using namespace skycast;

std::vector<SampleRun> single_run(std::vector<double> values) {
    std::vector<SampleRun> runs(1);
    runs[0].values = std::move(values);
    runs[0].index.resize(runs[0].values.size());
    std::iota(runs[0].index.begin(), runs[0].index.end(), 0);
    return runs;
}

void BM_ClearSkyYear(benchmark::State& state) {
    const SiteLocation site{41.92, 8.73};
    const SolisParams params;
    std::vector<Timestamp> stamps(8760);
    for (std::size_t i = 0; i < stamps.size(); ++i) {
        stamps[i] = static_cast<Timestamp>(i) * kHourStep;
    }
    for (auto _ : state) {
        auto series = clear_sky_series(site, params, stamps);
        benchmark::DoNotOptimize(series.values.data());
    }
    state.SetItemsProcessed(state.iterations() * 8760);
}
BENCHMARK(BM_ClearSkyYear);

void BM_ArmaFitQ0(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto runs = single_run(simulate_arma({0.5, 0.3}, {}, 0.2, 0.1, n, 1));
    for (auto _ : state) {
        auto model = arma::fit(runs, {2, 0});
        benchmark::DoNotOptimize(model.sigma2);
    }
}
BENCHMARK(BM_ArmaFitQ0)->Arg(2000)->Arg(8000);

void BM_ArmaFitQ1(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto runs = single_run(simulate_arma({0.5, 0.3}, {0.4}, 0.2, 0.1, n, 1));
    for (auto _ : state) {
        auto model = arma::fit(runs, {2, 1});
        benchmark::DoNotOptimize(model.sigma2);
    }
}
BENCHMARK(BM_ArmaFitQ1)->Arg(2000)->Arg(8000);

void BM_ArmaForecast(benchmark::State& state) {
    const auto runs = single_run(simulate_arma({0.5, 0.3}, {0.4}, 0.2, 0.1, 2000, 1));
    const auto model = arma::fit(runs, {2, 1});
    arma::ArmaFilter filter(model);
    filter.observe(0.9);
    filter.observe(1.1);
    double x = 1.0;
    for (auto _ : state) {
        const double f = filter.forecast_next();
        benchmark::DoNotOptimize(f);
        filter.observe(x);
        x = 0.5 * x + f * 0.1;
    }
}
BENCHMARK(BM_ArmaForecast);

void BM_MlpForward(benchmark::State& state) {
    nn::MlpModel model;
    model.spec = {3, 12};
    model.scaling.mean.assign(3, 0.0);
    model.scaling.stddev.assign(3, 1.0);
    model.weights.assign(model.spec.n_params(), 0.1);
    const std::vector<double> lags = {0.9, 1.0, 1.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.forward(lags));
    }
}
BENCHMARK(BM_MlpForward);

void BM_MlpLossGrad(benchmark::State& state) {
    nn::MlpModel model;
    model.spec = {3, 12};
    model.scaling.mean.assign(3, 0.0);
    model.scaling.stddev.assign(3, 1.0);
    model.weights.assign(model.spec.n_params(), 0.1);
    model.reg_alpha = 0.01;
    model.reg_beta = 1.0;

    nn::TrainingSet batch;
    batch.p = 3;
    for (int k = 0; k < 256; ++k) {
        batch.inputs.push_back(0.01 * k);
        batch.inputs.push_back(0.02 * k);
        batch.inputs.push_back(0.03 * k);
        batch.targets.push_back(0.9);
    }
    for (auto _ : state) {
        auto lg = nn::loss_and_gradient(model, batch);
        benchmark::DoNotOptimize(lg.grad.data());
    }
    state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_MlpLossGrad);

void BM_PmpFromBics(benchmark::State& state) {
    const std::vector<double> bics = {-2.33, -2.59, -2.03, -1.7, -2.41, -2.2, -1.9, -2.5};
    for (auto _ : state) {
        auto pmps = pmp_from_bics(bics);
        benchmark::DoNotOptimize(pmps.data());
    }
}
BENCHMARK(BM_PmpFromBics);

void BM_IngestCsvYear(benchmark::State& state) {
    SyntheticSpec spec;
    spec.kind = SynthKind::Ar;
    spec.n = 8760;
    spec.seed = 3;
    const auto fixture = generate(spec);
    std::ostringstream text;
    write_series_csv(text, fixture.ghi, &fixture.clearsky);
    const std::string payload = text.str();

    CsvSchema schema;
    schema.has_clearsky = true;
    for (auto _ : state) {
        std::istringstream in(payload);
        auto result = ingest_csv(in, schema, "bench");
        benchmark::DoNotOptimize(result.ghi.values.data());
    }
    state.SetItemsProcessed(state.iterations() * 8760);
}
BENCHMARK(BM_IngestCsvYear);

}  // namespace

BENCHMARK_MAIN();
