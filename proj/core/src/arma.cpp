#include "skycast/arma.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <future>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "skycast/errors.hpp"

namespace skycast::arma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Parameter packing: beta = [phi0, phi_1..phi_p, theta_1..theta_q].
struct Problem {
    const std::vector<SampleRun>* runs;
    int p;
    int q;
    std::size_t n_eff;
};

std::size_t effective_samples(const std::vector<SampleRun>& runs, int p) {
    std::size_t n = 0;
    for (const auto& r : runs) {
        if (r.size() > static_cast<std::size_t>(p)) n += r.size() - p;
    }
    return n;
}

// CSS residuals with zero pre-sample residuals, restarted per run.
// Returns the sum of squares; residuals are written to `out` when not null.
// eps_buf is scratch space reused across calls.
double residual_pass(const Problem& pb, const double* beta, double* out,
                     std::vector<double>& eps_buf) {
    const int p = pb.p;
    const int q = pb.q;
    const double phi0 = beta[0];
    const double* phi = beta + 1;
    const double* theta = beta + 1 + p;

    double sse = 0.0;
    std::size_t k = 0;
    for (const auto& run : *pb.runs) {
        const auto len = static_cast<std::ptrdiff_t>(run.size());
        if (len <= p) continue;
        const double* y = run.values.data();
        // q zeros of front padding so eps[t - j] is safe even when j > t;
        // pre-sample residuals are zero by convention.
        eps_buf.assign(static_cast<std::size_t>(len + q), 0.0);
        double* eps = eps_buf.data() + q;
        for (std::ptrdiff_t t = p; t < len; ++t) {
            double pred = phi0;
            for (int i = 1; i <= p; ++i) pred += phi[i - 1] * y[t - i];
            for (int j = 1; j <= q; ++j) pred -= theta[j - 1] * eps[t - j];
            const double e = y[t] - pred;
            eps[t] = e;
            sse += e * e;
            if (out) out[k++] = e;
        }
    }
    return sse;
}

// Ordinary least squares for y_t ~ [1, y_{t-1..p}] over all runs.
// Returns coefficients (size p+1) and the SSE.
struct OlsFit {
    Eigen::VectorXd coef;
    double sse;
    std::size_t n;
};

OlsFit ols_lagged(const std::vector<SampleRun>& runs, int p) {
    const std::size_t n = effective_samples(runs, p);
    Eigen::MatrixXd X(n, p + 1);
    Eigen::VectorXd y(n);
    std::size_t row = 0;
    for (const auto& run : runs) {
        const std::size_t len = run.size();
        if (len <= static_cast<std::size_t>(p)) continue;
        for (std::size_t t = p; t < len; ++t) {
            X(row, 0) = 1.0;
            for (int i = 1; i <= p; ++i) X(row, i) = run.values[t - i];
            y(row) = run.values[t];
            ++row;
        }
    }
    const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(y);
    if (!coef.allFinite()) {
        throw NumericalFailure("lagged regression is singular");
    }
    const double sse = (y - X * coef).squaredNorm();
    return {coef, sse, n};
}

// Largest root norm of the companion of z^k - c_1 z^{k-1} - ... - c_k.
// The lag polynomial 1 - c_1 B - ... - c_k B^k has all roots outside the
// unit circle iff this value is < 1.
double max_companion_root(const std::vector<double>& c) {
    const int k = static_cast<int>(c.size());
    if (k == 0) return 0.0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) companion(0, i) = c[i];
    for (int i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
    const Eigen::VectorXcd ev = companion.eigenvalues();
    double worst = 0.0;
    for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(ev(i)));
    return worst;
}

bool roots_outside_unit_circle(const std::vector<double>& c) {
    return max_companion_root(c) < 1.0 - 1e-10;
}

double max_ma_root(const Eigen::VectorXd& beta, int p, int q) {
    if (q == 0) return 0.0;
    const std::vector<double> theta(beta.data() + 1 + p, beta.data() + 1 + p + q);
    return max_companion_root(theta);
}

// Hannan-Rissanen style start: residuals from a long AR regression feed an
// OLS in both lagged values and lagged residuals.
void initial_guess(const std::vector<SampleRun>& runs, int p, int q,
                   Eigen::VectorXd& beta) {
    beta.setZero(1 + p + q);
    const OlsFit ar = ols_lagged(runs, p);
    beta(0) = ar.coef(0);
    for (int i = 0; i < p; ++i) beta(1 + i) = ar.coef(1 + i);
    if (q == 0) return;

    const int lag = std::min<int>(20 + p + q, 50);
    const std::size_t row_start = static_cast<std::size_t>(lag + std::max(p, q));
    std::size_t usable = 0;
    for (const auto& r : runs) {
        if (r.size() > row_start) usable += r.size() - row_start;
    }
    if (usable < static_cast<std::size_t>(4 * (1 + p + q))) return;  // keep theta = 0

    const OlsFit long_ar = ols_lagged(runs, lag);

    // Second-stage regression on lagged values and lagged residual estimates.
    Eigen::MatrixXd X(usable, 1 + p + q);
    Eigen::VectorXd y(usable);
    std::size_t row = 0;
    std::vector<double> eps;
    const std::size_t start_off = row_start;
    for (const auto& run : runs) {
        const std::size_t len = run.size();
        if (len <= start_off) continue;
        eps.assign(len, 0.0);
        for (std::size_t t = lag; t < len; ++t) {
            double pred = long_ar.coef(0);
            for (int i = 1; i <= lag; ++i) pred += long_ar.coef(i) * run.values[t - i];
            eps[t] = run.values[t] - pred;
        }
        for (std::size_t t = start_off; t < len; ++t) {
            X(row, 0) = 1.0;
            for (int i = 1; i <= p; ++i) X(row, i) = run.values[t - i];
            for (int j = 1; j <= q; ++j) X(row, p + j) = eps[t - j];
            y(row) = run.values[t];
            ++row;
        }
    }
    if (row < static_cast<std::size_t>(2 * (1 + p + q))) return;

    const Eigen::VectorXd sol =
        X.topRows(row).colPivHouseholderQr().solve(y.head(row));
    if (!sol.allFinite()) return;

    beta(0) = sol(0);
    for (int i = 0; i < p; ++i) beta(1 + i) = sol(1 + i);
    // Regression coefficient on eps_{t-j} is -theta_j.
    for (int j = 0; j < q; ++j) {
        double th = -sol(1 + p + j);
        if (!std::isfinite(th) || std::abs(th) > 2.0) th = 0.0;
        beta(1 + p + j) = th;
    }
    // start well inside the invertible region
    while (max_ma_root(beta, p, q) > 0.98) {
        for (int j = 0; j < q; ++j) beta(1 + p + j) *= 0.7;
    }
}

// Forward differences against the base residuals. The optimum is defined by
// the sum of squares alone, so first-order Jacobian accuracy only affects the
// step direction, not where the iteration settles.
void numeric_jacobian(const Problem& pb, const Eigen::VectorXd& beta,
                      const std::vector<double>& base, Eigen::MatrixXd& jac,
                      std::vector<double>& plus, std::vector<double>& eps_buf) {
    const int m = static_cast<int>(beta.size());
    Eigen::VectorXd b = beta;
    for (int j = 0; j < m; ++j) {
        const double h = 1e-7 * std::max(1.0, std::abs(beta(j)));
        b(j) = beta(j) + h;
        residual_pass(pb, b.data(), plus.data(), eps_buf);
        b(j) = beta(j);
        const double inv = 1.0 / h;
        for (std::size_t i = 0; i < pb.n_eff; ++i) {
            jac(i, j) = (plus[i] - base[i]) * inv;
        }
    }
}

ArmaModel finish_model(const ArmaSpec& spec, const Eigen::VectorXd& beta, double sse,
                       std::size_t n_eff, const FitOptions& opts, bool converged,
                       int iterations, double grad_norm) {
    ArmaModel m;
    m.spec = spec;
    m.phi0 = beta(0);
    m.phi.assign(beta.data() + 1, beta.data() + 1 + spec.p);
    m.theta.assign(beta.data() + 1 + spec.p, beta.data() + 1 + spec.p + spec.q);
    m.n_params = 1 + spec.p + spec.q;
    m.n_train = n_eff;
    m.css = sse;
    m.sigma2 = std::max(sse / static_cast<double>(n_eff), opts.sigma2_floor);
    m.converged = converged;
    m.iterations = iterations;
    m.gradient_norm = grad_norm;
    m.ar_stationary = roots_outside_unit_circle(m.phi);
    m.ma_invertible = roots_outside_unit_circle(m.theta);
    return m;
}

}  // namespace

std::string ArmaSpec::label() const {
    return "arma(" + std::to_string(p) + "," + std::to_string(q) + ")";
}

ArmaModel fit(const std::vector<SampleRun>& train, const ArmaSpec& spec,
              const FitOptions& opts) {
    if (spec.p < 1 || spec.q < 0) {
        throw ConfigError("arma spec requires p >= 1 and q >= 0");
    }
    const std::size_t n_eff = effective_samples(train, spec.p);
    const std::size_t required =
        static_cast<std::size_t>(opts.data_factor) * (spec.p + spec.q + 1);
    if (n_eff < required) {
        throw InsufficientData("arma fit needs at least " + std::to_string(required) +
                               " effective samples, got " + std::to_string(n_eff));
    }

    // Degenerate target: constant series. Return the documented floor.
    double mean = 0.0, var = 0.0;
    std::size_t cnt = 0;
    for (const auto& r : train) {
        for (double v : r.values) {
            mean += v;
            ++cnt;
        }
    }
    mean /= static_cast<double>(cnt);
    for (const auto& r : train) {
        for (double v : r.values) var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(cnt);
    if (var < 1e-18) {
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(1 + spec.p + spec.q);
        beta(0) = mean;
        return finish_model(spec, beta, 0.0, n_eff, opts, true, 0, 0.0);
    }

    if (spec.q == 0 && !opts.force_gauss_newton) {
        const OlsFit ols = ols_lagged(train, spec.p);
        Eigen::VectorXd beta(1 + spec.p);
        beta = ols.coef;
        return finish_model(spec, beta, ols.sse, n_eff, opts, true, 0, 0.0);
    }

    const Problem pb{&train, spec.p, spec.q, n_eff};
    const int m = 1 + spec.p + spec.q;

    Eigen::VectorXd beta;
    initial_guess(train, spec.p, spec.q, beta);

    std::vector<double> res(n_eff), trial_res(n_eff), plus(n_eff), eps_buf;
    Eigen::MatrixXd jac(n_eff, m);

    double sse = residual_pass(pb, beta.data(), res.data(), eps_buf);
    if (!std::isfinite(sse)) {
        beta.setZero();
        beta(0) = mean;
        sse = residual_pass(pb, beta.data(), res.data(), eps_buf);
    }

    double lambda = 1e-3;
    double grad_norm = kNaN;
    // SSE a window of iterations ago, for plateau detection on flat valleys
    std::vector<double> history;
    const int window = 10;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        numeric_jacobian(pb, beta, res, jac, plus, eps_buf);
        const Eigen::Map<const Eigen::VectorXd> r(res.data(), n_eff);
        const Eigen::VectorXd g = jac.transpose() * r;  // 1/2 gradient of SSE
        grad_norm = 2.0 * g.norm();
        const Eigen::MatrixXd jtj = jac.transpose() * jac;

        bool accepted = false;
        while (lambda < 1e14) {
            Eigen::MatrixXd a = jtj;
            a.diagonal().array() += lambda;
            const Eigen::VectorXd step = a.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd trial = beta + step;
            // Zero-pre-sample CSS is degenerate in the explosive MA region:
            // the objective can be nudged down indefinitely there while the
            // parameters diverge. Keep iterates in the closed invertible set.
            if (max_ma_root(trial, spec.p, spec.q) > 1.0 + 1e-6) {
                lambda *= 10.0;
                continue;
            }
            const double trial_sse = residual_pass(pb, trial.data(), trial_res.data(), eps_buf);
            if (std::isfinite(trial_sse) && trial_sse < sse) {
                const double drop = sse - trial_sse;
                beta = trial;
                sse = trial_sse;
                res.swap(trial_res);
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                if (drop <= opts.rel_tolerance * (sse + 1e-300)) {
                    return finish_model(spec, beta, sse, n_eff, opts, true, iter + 1, grad_norm);
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No downhill step left. Done if the gradient is small, or if we
            // are pinned against the invertibility boundary.
            if (grad_norm <= 1e-6 * (1.0 + sse) ||
                max_ma_root(beta, spec.p, spec.q) >= 1.0 - 1e-3) {
                return finish_model(spec, beta, sse, n_eff, opts, true, iter + 1, grad_norm);
            }
            throw NonConvergence(spec.label() + ": stalled", iter + 1, grad_norm);
        }

        history.push_back(sse);
        static const bool trace = std::getenv("SKYCAST_ARMA_TRACE") != nullptr;
        if (trace && iter % 25 == 0) {
            std::fprintf(stderr, "iter %3d sse %.12f grad %.3e lambda %.1e\n", iter, sse,
                         grad_norm, lambda);
        }
        if (iter >= window) {
            const double old = history[iter - window];
            if (old - sse <= 1e-6 * (sse + 1e-300)) {
                return finish_model(spec, beta, sse, n_eff, opts, true, iter + 1, grad_norm);
            }
        }
    }
    throw NonConvergence(spec.label() + ": iteration limit", iter, grad_norm);
}

ArmaModel fit(const std::vector<double>& train, const ArmaSpec& spec,
              const FitOptions& opts) {
    std::vector<SampleRun> runs(1);
    runs[0].values = train;
    runs[0].index.resize(train.size());
    std::iota(runs[0].index.begin(), runs[0].index.end(), 0);
    return fit(runs, spec, opts);
}

double forecast_one_step(const ArmaModel& model, std::span<const double> values,
                         std::span<const double> residuals) {
    const int p = model.spec.p;
    const int q = model.spec.q;
    if (values.size() < static_cast<std::size_t>(p)) {
        throw InsufficientHistory("need " + std::to_string(p) + " lagged values");
    }
    if (residuals.size() < static_cast<std::size_t>(q)) {
        throw InsufficientHistory("need " + std::to_string(q) + " lagged residuals");
    }
    double pred = model.phi0;
    for (int i = 0; i < p; ++i) pred += model.phi[i] * values[i];
    for (int j = 0; j < q; ++j) pred -= model.theta[j] * residuals[j];
    return pred;
}

double bic(const ArmaModel& model) {
    if (model.n_train < 2) throw InsufficientData("bic needs n_train > 1");
    const double n = static_cast<double>(model.n_train);
    const double s2 = std::max(model.sigma2, 1e-12);
    return std::log(s2) + static_cast<double>(model.n_params) * std::log(n) / n;
}

ArmaFilter::ArmaFilter(const ArmaModel& model) : model_(&model) { reset(); }

void ArmaFilter::reset() {
    values_.assign(model_->spec.p, 0.0);
    residuals_.assign(std::max(model_->spec.q, 1), 0.0);
    seen_ = 0;
}

bool ArmaFilter::ready() const {
    return seen_ >= static_cast<std::size_t>(model_->spec.p);
}

double ArmaFilter::forecast_next() const {
    if (!ready()) throw InsufficientHistory("filter has seen fewer than p samples");
    return forecast_one_step(*model_, values_, residuals_);
}

void ArmaFilter::observe(double y) {
    double eps = 0.0;  // pre-sample residuals are zero by convention
    if (ready()) eps = y - forecast_next();
    values_.insert(values_.begin(), y);
    values_.pop_back();
    residuals_.insert(residuals_.begin(), eps);
    residuals_.pop_back();
    ++seen_;
}

GridResult grid_search(const std::vector<SampleRun>& train, int p_min, int p_max,
                       int q_min, int q_max, const FitOptions& opts,
                       unsigned threads) {
    if (p_min < 1 || p_min > p_max || q_min < 0 || q_min > q_max) {
        throw ConfigError("invalid arma grid bounds");
    }

    std::vector<ArmaSpec> specs;
    for (int p = p_min; p <= p_max; ++p) {
        for (int q = q_min; q <= q_max; ++q) specs.push_back({p, q});
    }

    GridResult result;
    result.attempted = specs.size();
    result.cells.resize(specs.size());

    const auto fit_cell = [&](std::size_t i) {
        GridCell cell;
        cell.spec = specs[i];
        try {
            cell.model = fit(train, specs[i], opts);
            cell.bic = bic(*cell.model);
        } catch (const Error& e) {
            cell.model.reset();
            cell.bic = kNaN;
            cell.error = e.what();
        }
        result.cells[i] = std::move(cell);
    };

    if (threads > 1) {
        std::vector<std::future<void>> futures;
        const std::size_t chunk = (specs.size() + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(specs.size(), lo + chunk);
            if (lo >= hi) break;
            futures.push_back(std::async(std::launch::async, [&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i) fit_cell(i);
            }));
        }
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < specs.size(); ++i) fit_cell(i);
    }

    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        if (result.cells[i].model) result.ranked.push_back(i);
    }
    if (result.ranked.empty()) {
        throw AllFitsFailed("no arma grid cell converged");
    }
    std::sort(result.ranked.begin(), result.ranked.end(), [&](std::size_t a, std::size_t b) {
        const GridCell& ca = result.cells[a];
        const GridCell& cb = result.cells[b];
        if (ca.bic != cb.bic) return ca.bic < cb.bic;
        const int sa = ca.spec.p + ca.spec.q;
        const int sb = cb.spec.p + cb.spec.q;
        if (sa != sb) return sa < sb;  // parsimony
        return ca.spec.q < cb.spec.q;
    });
    return result;
}

}  // namespace skycast::arma
