#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skycast/series.hpp"

namespace skycast::arma {

struct ArmaSpec {
    int p = 1;  // AR order, >= 1
    int q = 0;  // MA order, >= 0

    bool operator==(const ArmaSpec&) const = default;
    std::string label() const;  // "arma(p,q)"
};

struct ArmaModel {
    ArmaSpec spec;
    double phi0 = 0.0;
    std::vector<double> phi;    // phi_1..phi_p
    std::vector<double> theta;  // theta_1..theta_q
    double sigma2 = 0.0;        // SSE / n_eff, floored at sigma2_floor
    std::size_t n_train = 0;    // residuals actually formed (n_eff)
    int n_params = 0;           // 1 + p + q

    bool converged = true;
    int iterations = 0;
    double gradient_norm = 0.0;
    double css = 0.0;  // conditional sum of squared residuals at the optimum

    // Unit-circle diagnostics, reported but never enforced.
    bool ar_stationary = true;
    bool ma_invertible = true;
};

struct FitOptions {
    int max_iterations = 400;
    double rel_tolerance = 1e-10;   // relative CSS decrease considered converged
    double sigma2_floor = 1e-12;
    bool force_gauss_newton = false;  // run the iterative path even when q == 0
    // Minimum effective samples = data_factor * (p + q + 1).
    int data_factor = 50;
};

// Conditional sum-of-squares estimation with zero pre-sample residuals.
// q == 0 solves the lagged regression in closed form; q >= 1 starts from a
// long-AR regression and polishes with damped Gauss-Newton on numerical
// Jacobians. Throws InsufficientData / NonConvergence / NumericalFailure.
ArmaModel fit(const std::vector<SampleRun>& train, const ArmaSpec& spec,
              const FitOptions& opts = {});
ArmaModel fit(const std::vector<double>& train, const ArmaSpec& spec,
              const FitOptions& opts = {});

// values[0] is y_{t-1}, residuals[0] is eps_{t-1}. Throws InsufficientHistory.
double forecast_one_step(const ArmaModel& model, std::span<const double> values,
                         std::span<const double> residuals);

// Per-observation information criterion: ln(sigma2) + n_params * ln(n) / n.
double bic(const ArmaModel& model);

// Streaming one-step filter: feed observations in order, ask for the next
// forecast once p lags are available. Residual state matches the CSS
// recursion used by fit (pre-sample residuals zero, reset per run).
class ArmaFilter {
public:
    explicit ArmaFilter(const ArmaModel& model);

    void reset();
    void observe(double y);
    bool ready() const;  // p lags available
    double forecast_next() const;

private:
    const ArmaModel* model_;
    std::vector<double> values_;     // most recent first
    std::vector<double> residuals_;  // most recent first
    std::size_t seen_ = 0;
};

struct GridCell {
    ArmaSpec spec;
    std::optional<ArmaModel> model;
    double bic = 0.0;   // valid when model is set
    std::string error;  // failure reason otherwise
};

struct GridResult {
    std::vector<GridCell> cells;     // every attempted cell, grid order
    std::vector<std::size_t> ranked;  // indices of successful cells, best first
    std::size_t attempted = 0;

    const GridCell& best() const { return cells[ranked.front()]; }
};

// Fits every (p, q) combination in the inclusive ranges. Failed cells are
// recorded and excluded from the ranking. Ties break toward smaller p+q,
// then smaller q. threads <= 1 runs sequentially; the ranking is identical
// either way. Throws AllFitsFailed when nothing converged.
GridResult grid_search(const std::vector<SampleRun>& train, int p_min, int p_max,
                       int q_min, int q_max, const FitOptions& opts = {},
                       unsigned threads = 1);

}  // namespace skycast::arma
