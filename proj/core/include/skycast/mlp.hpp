#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skycast/series.hpp"

namespace skycast::nn {

struct MlpSpec {
    int p = 1;  // lagged inputs
    int h = 1;  // hidden tanh units

    int n_params() const { return (p + 2) * h + 1; }
    bool operator==(const MlpSpec&) const = default;
    std::string label() const;  // "nn(p,h)"
};

// Per-lag affine normalization applied to inputs before the network.
struct InputScaling {
    std::vector<double> mean;
    std::vector<double> stddev;
};

// Single-hidden-layer autoregressive perceptron:
//   out = alpha0 + sum_j alpha_j * tanh(beta0_j + sum_i beta_ji * z_i)
// on standardized lags z. Weights are packed as
//   [alpha0, alpha_1..alpha_h, beta0_1..beta0_h, beta_11..beta_1p, beta_21..]
struct MlpModel {
    MlpSpec spec;
    std::vector<double> weights;
    InputScaling scaling;

    double reg_alpha = 0.0;  // weight-decay hyperparameter
    double reg_beta = 0.0;   // noise-precision hyperparameter
    double gamma_eff = 0.0;  // effective number of parameters
    double sigma2 = 0.0;     // 2 E_D / n at the converged weights
    std::size_t n_train = 0;
    std::uint64_t seed = 0;

    bool converged = true;
    int outer_iterations = 0;
    bool small_data_warning = false;  // n < 10 * n_params at training time

    // lags[0] is y_{t-1}; the stored scaling is applied internally.
    double forward(std::span<const double> lags) const;
};

// Flattened (lags, target) pairs; inputs are raw (unscaled) lags, row-major.
struct TrainingSet {
    int p = 0;
    std::vector<double> inputs;
    std::vector<double> targets;

    std::size_t size() const { return targets.size(); }
};

TrainingSet make_training_set(const std::vector<SampleRun>& runs, int p);

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

// Regularized objective reg_beta * sum(r^2)/2 + reg_alpha * sum(w^2)/2 and
// its exact reverse-mode gradient over all weights.
LossGrad loss_and_gradient(const MlpModel& model, const TrainingSet& batch);

struct TrainOptions {
    std::uint64_t seed = 1;
    int max_outer = 200;
    int max_inner = 50;
    double tol = 1e-5;  // relative stop for hyperparameters and objective
    double init_reg_alpha = 1e-2;
    double init_reg_beta = 1.0;
};

// Evidence-framework training: Levenberg-Marquardt steps on the regularized
// objective alternate with the closed-form hyperparameter re-estimates
//   gamma = sum_i lambda_i / (lambda_i + reg_alpha)   (Gauss-Newton Hessian)
//   reg_alpha <- gamma / (2 E_W),  reg_beta <- (n - gamma) / (2 E_D).
// Fully reproducible for a fixed (seed, data, spec, opts). Never throws on
// slow convergence: returns best-so-far with converged = false.
MlpModel train_bayes_reg(const TrainingSet& train, const MlpSpec& spec,
                         const TrainOptions& opts = {});
MlpModel train_bayes_reg(const std::vector<SampleRun>& train, const MlpSpec& spec,
                         const TrainOptions& opts = {});

// ln(sigma2) + m * ln(n) / n with m the raw parameter count by default, or
// gamma_eff when use_effective_params is set.
double bic(const MlpModel& model, bool use_effective_params = false);

struct Candidate {
    MlpSpec spec;
    std::optional<MlpModel> model;
    double bic = 0.0;
    std::string error;
};

struct SelectionResult {
    std::vector<Candidate> candidates;
    std::vector<std::size_t> ranked;

    const Candidate& best() const { return candidates[ranked.front()]; }
};

// Trains every (p, h) combination; per-candidate seeds are derived from
// opts.seed and the spec so results do not depend on evaluation order.
SelectionResult select_nn(const std::vector<SampleRun>& train,
                          std::span<const int> p_candidates,
                          std::span<const int> h_candidates,
                          const TrainOptions& opts = {},
                          bool bic_use_effective_params = false,
                          unsigned threads = 1);

}  // namespace skycast::nn
