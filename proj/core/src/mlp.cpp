#include "skycast/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "skycast/errors.hpp"

namespace skycast::nn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct WeightView {
    // Offsets into the packed weight vector.
    int h, p;
    int alpha0() const { return 0; }
    int alpha(int j) const { return 1 + j; }
    int beta0(int j) const { return 1 + h + j; }
    int beta(int j, int i) const { return 1 + 2 * h + j * p + i; }
};

// Network output on already-scaled inputs; optionally fills the derivative
// of the output with respect to every weight (one Jacobian row).
double eval_scaled(const MlpSpec& spec, const double* w, const double* z,
                   double* dout) {
    const WeightView v{spec.h, spec.p};
    double out = w[v.alpha0()];
    if (dout) dout[v.alpha0()] = 1.0;
    for (int j = 0; j < spec.h; ++j) {
        double a = w[v.beta0(j)];
        const double* wj = w + v.beta(j, 0);
        for (int i = 0; i < spec.p; ++i) a += wj[i] * z[i];
        const double t = std::tanh(a);
        out += w[v.alpha(j)] * t;
        if (dout) {
            dout[v.alpha(j)] = t;
            const double s = w[v.alpha(j)] * (1.0 - t * t);
            dout[v.beta0(j)] = s;
            double* dj = dout + v.beta(j, 0);
            for (int i = 0; i < spec.p; ++i) dj[i] = s * z[i];
        }
    }
    return out;
}

void scale_inputs(const TrainingSet& ts, const InputScaling& sc,
                  std::vector<double>& scaled) {
    const std::size_t n = ts.size();
    scaled.resize(n * ts.p);
    for (std::size_t r = 0; r < n; ++r) {
        for (int i = 0; i < ts.p; ++i) {
            scaled[r * ts.p + i] =
                (ts.inputs[r * ts.p + i] - sc.mean[i]) / sc.stddev[i];
        }
    }
}

InputScaling fit_scaling(const TrainingSet& ts) {
    InputScaling sc;
    sc.mean.assign(ts.p, 0.0);
    sc.stddev.assign(ts.p, 1.0);
    const std::size_t n = ts.size();
    if (n == 0) return sc;
    for (int i = 0; i < ts.p; ++i) {
        double m = 0.0;
        for (std::size_t r = 0; r < n; ++r) m += ts.inputs[r * ts.p + i];
        m /= static_cast<double>(n);
        double v = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = ts.inputs[r * ts.p + i] - m;
            v += d * d;
        }
        v /= static_cast<double>(n);
        sc.mean[i] = m;
        sc.stddev[i] = std::max(std::sqrt(v), 1e-12);
    }
    return sc;
}

// Residuals r = f(z) - y, Jacobian rows d f / d w.
void residuals_and_jacobian(const MlpSpec& spec, const double* w,
                            const std::vector<double>& scaled,
                            const std::vector<double>& targets,
                            Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
    const std::size_t n = targets.size();
    std::vector<double> row(spec.n_params());
    for (std::size_t k = 0; k < n; ++k) {
        const double out = eval_scaled(spec, w, scaled.data() + k * spec.p, row.data());
        r(k) = out - targets[k];
        for (int j = 0; j < spec.n_params(); ++j) jac(k, j) = row[j];
    }
}

double data_error(const MlpSpec& spec, const double* w,
                  const std::vector<double>& scaled,
                  const std::vector<double>& targets) {
    double ed = 0.0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const double d = eval_scaled(spec, w, scaled.data() + k * spec.p, nullptr) - targets[k];
        ed += d * d;
    }
    return 0.5 * ed;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::string MlpSpec::label() const {
    return "nn(" + std::to_string(p) + "," + std::to_string(h) + ")";
}

double MlpModel::forward(std::span<const double> lags) const {
    if (lags.size() != static_cast<std::size_t>(spec.p)) {
        throw InsufficientHistory("mlp forward expects exactly " +
                                  std::to_string(spec.p) + " lags");
    }
    std::vector<double> z(spec.p);
    for (int i = 0; i < spec.p; ++i) {
        z[i] = (lags[i] - scaling.mean[i]) / scaling.stddev[i];
    }
    return eval_scaled(spec, weights.data(), z.data(), nullptr);
}

TrainingSet make_training_set(const std::vector<SampleRun>& runs, int p) {
    TrainingSet ts;
    ts.p = p;
    for (const auto& run : runs) {
        const std::size_t len = run.size();
        if (len <= static_cast<std::size_t>(p)) continue;
        for (std::size_t t = p; t < len; ++t) {
            for (int i = 1; i <= p; ++i) ts.inputs.push_back(run.values[t - i]);
            ts.targets.push_back(run.values[t]);
        }
    }
    return ts;
}

LossGrad loss_and_gradient(const MlpModel& model, const TrainingSet& batch) {
    if (batch.size() == 0) throw EmptyInput("loss_and_gradient: empty batch");
    if (batch.p != model.spec.p) {
        throw LengthMismatch("batch lag count does not match the model");
    }
    const int m = model.spec.n_params();
    LossGrad lg;
    lg.grad.assign(m, 0.0);

    std::vector<double> scaled;
    scale_inputs(batch, model.scaling, scaled);

    std::vector<double> row(m);
    double ed = 0.0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const double out = eval_scaled(model.spec, model.weights.data(),
                                       scaled.data() + k * model.spec.p, row.data());
        const double r = out - batch.targets[k];
        ed += r * r;
        for (int j = 0; j < m; ++j) lg.grad[j] += model.reg_beta * r * row[j];
    }
    double ew = 0.0;
    for (int j = 0; j < m; ++j) {
        ew += model.weights[j] * model.weights[j];
        lg.grad[j] += model.reg_alpha * model.weights[j];
    }
    lg.loss = 0.5 * model.reg_beta * ed + 0.5 * model.reg_alpha * ew;
    return lg;
}

MlpModel train_bayes_reg(const TrainingSet& train, const MlpSpec& spec,
                         const TrainOptions& opts) {
    if (spec.p < 1 || spec.h < 1) throw ConfigError("mlp spec requires p >= 1, h >= 1");
    if (train.p != spec.p) throw LengthMismatch("training set lag count != spec.p");
    const std::size_t n = train.size();
    const int m = spec.n_params();
    if (n == 0) throw InsufficientData("mlp training set is empty");

    double tmean = 0.0;
    for (double t : train.targets) tmean += t;
    tmean /= static_cast<double>(n);
    double tvar = 0.0;
    for (double t : train.targets) tvar += (t - tmean) * (t - tmean);
    tvar /= static_cast<double>(n);
    if (tvar < 1e-20) throw DegenerateData("mlp targets have zero variance");

    MlpModel model;
    model.spec = spec;
    model.seed = opts.seed;
    model.n_train = n;
    model.small_data_warning = n < static_cast<std::size_t>(10 * m);
    model.scaling = fit_scaling(train);

    // Scale-aware seeded initialization.
    std::mt19937_64 rng(opts.seed);
    model.weights.resize(m);
    const WeightView v{spec.h, spec.p};
    const double out_bound = 1.0 / std::sqrt(static_cast<double>(spec.h));
    const double hid_bound = 1.0 / std::sqrt(static_cast<double>(spec.p));
    std::uniform_real_distribution<double> uo(-out_bound, out_bound);
    std::uniform_real_distribution<double> uh(-hid_bound, hid_bound);
    model.weights[v.alpha0()] = uo(rng);
    for (int j = 0; j < spec.h; ++j) model.weights[v.alpha(j)] = uo(rng);
    for (int j = 0; j < spec.h; ++j) model.weights[v.beta0(j)] = uh(rng);
    for (int j = 0; j < spec.h; ++j) {
        for (int i = 0; i < spec.p; ++i) model.weights[v.beta(j, i)] = uh(rng);
    }

    std::vector<double> scaled;
    scale_inputs(train, model.scaling, scaled);

    Eigen::Map<Eigen::VectorXd> w(model.weights.data(), m);
    Eigen::VectorXd r(n);
    Eigen::MatrixXd jac(n, m);

    double reg_alpha = opts.init_reg_alpha;
    double reg_beta = opts.init_reg_beta;
    const auto clamp_hyper = [](double x) { return std::clamp(x, 1e-12, 1e12); };

    double ed = data_error(spec, w.data(), scaled, train.targets);
    double ew = 0.5 * w.squaredNorm();
    double objective = reg_beta * ed + reg_alpha * ew;
    double gamma = 0.0;

    bool converged = false;
    int outer = 0;
    for (; outer < opts.max_outer; ++outer) {
        // (a) minimize the fixed-hyperparameter objective.
        double mu = 1e-3;
        for (int inner = 0; inner < opts.max_inner; ++inner) {
            residuals_and_jacobian(spec, w.data(), scaled, train.targets, r, jac);
            const Eigen::VectorXd g = reg_beta * (jac.transpose() * r) + reg_alpha * w;
            Eigen::MatrixXd a = reg_beta * (jac.transpose() * jac);
            a.diagonal().array() += reg_alpha;

            bool accepted = false;
            while (mu < 1e12) {
                Eigen::MatrixXd damped = a;
                damped.diagonal().array() += mu;
                const Eigen::VectorXd step = damped.ldlt().solve(-g);
                if (!step.allFinite()) {
                    mu *= 10.0;
                    continue;
                }
                const Eigen::VectorXd trial = w + step;
                const double trial_ed = data_error(spec, trial.data(), scaled, train.targets);
                const double trial_ew = 0.5 * trial.squaredNorm();
                const double trial_obj = reg_beta * trial_ed + reg_alpha * trial_ew;
                if (std::isfinite(trial_obj) && trial_obj < objective) {
                    w = trial;
                    const double drop = objective - trial_obj;
                    objective = trial_obj;
                    ed = trial_ed;
                    ew = trial_ew;
                    mu = std::max(mu * 0.3, 1e-12);
                    accepted = true;
                    if (drop <= 1e-9 * (objective + 1e-300)) inner = opts.max_inner;
                    break;
                }
                mu *= 10.0;
            }
            if (!accepted) break;  // local minimum for these hyperparameters
        }

        // (b) evidence re-estimation from the Gauss-Newton data Hessian.
        residuals_and_jacobian(spec, w.data(), scaled, train.targets, r, jac);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reg_beta * jtj);
        gamma = 0.0;
        for (int i = 0; i < m; ++i) {
            const double lam = std::max(es.eigenvalues()(i), 0.0);
            gamma += lam / (lam + reg_alpha);
        }

        const double new_alpha = clamp_hyper(gamma / std::max(2.0 * ew, 1e-300));
        const double new_beta =
            clamp_hyper((static_cast<double>(n) - gamma) / std::max(2.0 * ed, 1e-300));
        const double new_obj = new_beta * ed + new_alpha * ew;

        const double da = std::abs(new_alpha - reg_alpha) / reg_alpha;
        const double db = std::abs(new_beta - reg_beta) / reg_beta;
        const double dobj = std::abs(new_obj - objective) / std::max(objective, 1e-300);
        reg_alpha = new_alpha;
        reg_beta = new_beta;
        objective = new_obj;
        if (da < opts.tol && db < opts.tol && dobj < opts.tol) {
            converged = true;
            ++outer;
            break;
        }
    }

    model.reg_alpha = reg_alpha;
    model.reg_beta = reg_beta;
    model.gamma_eff = gamma;
    model.sigma2 = 2.0 * ed / static_cast<double>(n);
    model.converged = converged;
    model.outer_iterations = outer;
    return model;
}

MlpModel train_bayes_reg(const std::vector<SampleRun>& train, const MlpSpec& spec,
                         const TrainOptions& opts) {
    return train_bayes_reg(make_training_set(train, spec.p), spec, opts);
}

double bic(const MlpModel& model, bool use_effective_params) {
    if (model.n_train < 2) throw InsufficientData("bic needs n_train > 1");
    const double n = static_cast<double>(model.n_train);
    const double m = use_effective_params ? model.gamma_eff
                                          : static_cast<double>(model.spec.n_params());
    return std::log(std::max(model.sigma2, 1e-12)) + m * std::log(n) / n;
}

SelectionResult select_nn(const std::vector<SampleRun>& train,
                          std::span<const int> p_candidates,
                          std::span<const int> h_candidates,
                          const TrainOptions& opts,
                          bool bic_use_effective_params, unsigned threads) {
    if (p_candidates.empty() || h_candidates.empty()) {
        throw ConfigError("nn selection needs non-empty candidate sets");
    }

    std::vector<MlpSpec> specs;
    for (int p : p_candidates) {
        for (int h : h_candidates) specs.push_back({p, h});
    }

    SelectionResult result;
    result.candidates.resize(specs.size());

    const auto train_one = [&](std::size_t i) {
        Candidate c;
        c.spec = specs[i];
        TrainOptions o = opts;
        // Candidate-local seed: independent of evaluation order.
        o.seed = splitmix64(opts.seed ^ splitmix64(
                     static_cast<std::uint64_t>(specs[i].p) * 1000003ull +
                     static_cast<std::uint64_t>(specs[i].h)));
        try {
            c.model = train_bayes_reg(train, specs[i], o);
            c.bic = bic(*c.model, bic_use_effective_params);
        } catch (const Error& e) {
            c.model.reset();
            c.bic = kNaN;
            c.error = e.what();
        }
        result.candidates[i] = std::move(c);
    };

    if (threads > 1) {
        std::vector<std::future<void>> futures;
        const std::size_t chunk = (specs.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(specs.size(), lo + chunk);
            if (lo >= hi) break;
            futures.push_back(std::async(std::launch::async, [&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i) train_one(i);
            }));
        }
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < specs.size(); ++i) train_one(i);
    }

    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
        if (result.candidates[i].model) result.ranked.push_back(i);
    }
    if (result.ranked.empty()) throw AllFitsFailed("no nn candidate trained successfully");
    std::sort(result.ranked.begin(), result.ranked.end(), [&](std::size_t a, std::size_t b) {
        const Candidate& ca = result.candidates[a];
        const Candidate& cb = result.candidates[b];
        if (ca.bic != cb.bic) return ca.bic < cb.bic;
        const int na = ca.spec.n_params();
        const int nb = cb.spec.n_params();
        if (na != nb) return na < nb;
        return ca.spec.p < cb.spec.p;
    });
    return result;
}

}  // namespace skycast::nn
