#include "skycast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "skycast/errors.hpp"
#include "skycast/mlp.hpp"

namespace skycast {

namespace {

std::vector<Timestamp> hourly_stamps(Timestamp start, std::size_t n) {
    std::vector<Timestamp> ts(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = start + static_cast<Timestamp>(i) * kHourStep;
    return ts;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

const char* to_string(SynthKind k) {
    switch (k) {
        case SynthKind::Ar: return "ar";
        case SynthKind::Arma: return "arma";
        case SynthKind::MlpTeacher: return "mlp-teacher";
        case SynthKind::CloudyClearSky: return "cloudy-clearsky";
    }
    return "unknown";
}

SynthKind synth_kind_from_string(const std::string& s) {
    if (s == "ar") return SynthKind::Ar;
    if (s == "arma") return SynthKind::Arma;
    if (s == "mlp-teacher") return SynthKind::MlpTeacher;
    if (s == "cloudy-clearsky") return SynthKind::CloudyClearSky;
    throw ConfigError("unknown synth kind '" + s + "'");
}

void SyntheticSpec::validate() const {
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
    switch (kind) {
        case SynthKind::Ar:
            if (!theta.empty()) throw ConfigError("ar kind takes no theta coefficients");
            [[fallthrough]];
        case SynthKind::Arma:
            if (phi.empty()) throw ConfigError("ar/arma kinds need phi coefficients");
            if (!(clearsky_level > 0.0)) throw ConfigError("clearsky_level must be > 0");
            break;
        case SynthKind::MlpTeacher:
            if (teacher_p < 1 || teacher_h < 1) {
                throw ConfigError("teacher spec requires p >= 1, h >= 1");
            }
            if (!teacher_weights.empty() &&
                teacher_weights.size() !=
                    static_cast<std::size_t>((teacher_p + 2) * teacher_h + 1)) {
                throw ConfigError("teacher weight count does not match (p+2)h+1");
            }
            break;
        case SynthKind::CloudyClearSky:
            site.validate();
            solis.validate();
            if (!(k_sigma >= 0.0)) throw ConfigError("k_sigma must be >= 0");
            break;
    }
}

std::vector<double> simulate_arma(const std::vector<double>& phi,
                                  const std::vector<double>& theta, double intercept,
                                  double noise_sigma, std::size_t n, std::uint64_t seed) {
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    const std::size_t burnin = 200;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma);

    double denom = 1.0;
    for (double c : phi) denom -= c;
    const double start_level = std::abs(denom) > 1e-9 ? intercept / denom : intercept;

    std::vector<double> y(burnin + n, start_level);
    std::vector<double> eps(burnin + n, 0.0);
    for (std::size_t t = 0; t < burnin + n; ++t) {
        const double e = noise_sigma > 0.0 ? noise(rng) : 0.0;
        eps[t] = e;
        double v = intercept + e;
        for (std::size_t i = 1; i <= p; ++i) {
            v += phi[i - 1] * (t >= i ? y[t - i] : start_level);
        }
        for (std::size_t j = 1; j <= q; ++j) {
            v -= theta[j - 1] * (t >= j ? eps[t - j] : 0.0);
        }
        y[t] = v;
    }
    return {y.begin() + burnin, y.end()};
}

SynthResult generate(const SyntheticSpec& spec) {
    spec.validate();

    SynthResult out;
    const auto stamps = hourly_stamps(spec.start, spec.n);
    out.ghi.timestamps = stamps;
    out.clearsky.timestamps = stamps;

    std::ostringstream meta;
    meta << "skycast-synth 1\n";
    meta << "kind = " << to_string(spec.kind) << "\n";
    meta << "n = " << spec.n << "\n";
    meta << "seed = " << spec.seed << "\n";
    meta << "start = " << format_iso8601(spec.start) << "\n";

    switch (spec.kind) {
        case SynthKind::Ar:
        case SynthKind::Arma: {
            const auto k = simulate_arma(spec.phi, spec.theta, spec.intercept,
                                         spec.noise_sigma, spec.n, spec.seed);
            for (std::size_t i = 0; i < spec.n; ++i) {
                out.clearsky.values.push_back(spec.clearsky_level);
                out.ghi.values.push_back(std::max(0.0, k[i] * spec.clearsky_level));
            }
            meta << "intercept = " << fmt(spec.intercept) << "\n";
            meta << "noise_sigma = " << fmt(spec.noise_sigma) << "\n";
            meta << "clearsky_level = " << fmt(spec.clearsky_level) << "\n";
            for (std::size_t i = 0; i < spec.phi.size(); ++i) {
                meta << "phi" << (i + 1) << " = " << fmt(spec.phi[i]) << "\n";
            }
            for (std::size_t i = 0; i < spec.theta.size(); ++i) {
                meta << "theta" << (i + 1) << " = " << fmt(spec.theta[i]) << "\n";
            }
            break;
        }
        case SynthKind::MlpTeacher: {
            nn::MlpModel teacher;
            teacher.spec = {spec.teacher_p, spec.teacher_h};
            teacher.scaling.mean.assign(spec.teacher_p, 0.0);
            teacher.scaling.stddev.assign(spec.teacher_p, 1.0);
            if (!spec.teacher_weights.empty()) {
                teacher.weights = spec.teacher_weights;
            } else {
                std::mt19937_64 wrng(spec.seed ^ 0x5eedbeefULL);
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                teacher.weights.resize(teacher.spec.n_params());
                for (auto& w : teacher.weights) w = u(wrng);
                // Keep the recursion stable: shrink output weights.
                for (int j = 0; j <= teacher.spec.h; ++j) teacher.weights[j] *= 0.4;
            }

            std::mt19937_64 rng(spec.seed);
            std::normal_distribution<double> noise(0.0, spec.noise_sigma);
            const std::size_t burnin = 200;
            std::vector<double> x(burnin + spec.n, 0.0);
            std::vector<double> lags(spec.teacher_p, 0.0);
            for (std::size_t t = 0; t < burnin + spec.n; ++t) {
                for (int i = 0; i < spec.teacher_p; ++i) {
                    const std::size_t back = static_cast<std::size_t>(i) + 1;
                    lags[i] = t >= back ? x[t - back] : 0.0;
                }
                x[t] = teacher.forward(lags) + (spec.noise_sigma > 0.0 ? noise(rng) : 0.0);
            }
            for (std::size_t i = 0; i < spec.n; ++i) {
                const double k = 1.0 + x[burnin + i];
                out.clearsky.values.push_back(spec.clearsky_level);
                out.ghi.values.push_back(std::max(0.0, k * spec.clearsky_level));
            }
            meta << "teacher_p = " << spec.teacher_p << "\n";
            meta << "teacher_h = " << spec.teacher_h << "\n";
            meta << "noise_sigma = " << fmt(spec.noise_sigma) << "\n";
            meta << "clearsky_level = " << fmt(spec.clearsky_level) << "\n";
            break;
        }
        case SynthKind::CloudyClearSky: {
            const auto cls = clear_sky_series(spec.site, spec.solis, stamps);
            std::mt19937_64 rng(spec.seed);
            std::normal_distribution<double> noise(0.0, spec.k_sigma);
            double k = spec.k_mean;
            for (std::size_t i = 0; i < spec.n; ++i) {
                k = spec.k_mean + spec.k_phi * (k - spec.k_mean) +
                    (spec.k_sigma > 0.0 ? noise(rng) : 0.0);
                k = std::clamp(k, 0.0, 1.2);
                out.clearsky.values.push_back(cls.values[i]);
                out.ghi.values.push_back(std::max(0.0, k * cls.values[i]));
            }
            meta << "latitude = " << fmt(spec.site.latitude_deg) << "\n";
            meta << "longitude = " << fmt(spec.site.longitude_deg) << "\n";
            meta << "k_mean = " << fmt(spec.k_mean) << "\n";
            meta << "k_phi = " << fmt(spec.k_phi) << "\n";
            meta << "k_sigma = " << fmt(spec.k_sigma) << "\n";
            break;
        }
    }

    out.sidecar = meta.str();
    return out;
}

}  // namespace skycast
