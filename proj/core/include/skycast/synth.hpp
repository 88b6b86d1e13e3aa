#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skycast/clearsky.hpp"
#include "skycast/series.hpp"

namespace skycast {

enum class SynthKind { Ar, Arma, MlpTeacher, CloudyClearSky };

const char* to_string(SynthKind k);
SynthKind synth_kind_from_string(const std::string& s);

// Seed-deterministic fixture generator. The ar/arma/mlp-teacher kinds emit a
// flat clear-sky column (clearsky_level) so the generated process is exactly
// the clear-sky index the pipeline recovers; cloudy-clearsky modulates a
// site's simulated clear-sky curve with a bounded AR(1) index clipped to
// [0, 1.2].
struct SyntheticSpec {
    SynthKind kind = SynthKind::Ar;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    Timestamp start = 0;

    // ar / arma
    double intercept = 0.3;
    std::vector<double> phi{0.7};
    std::vector<double> theta;
    double noise_sigma = 0.1;
    double clearsky_level = 800.0;

    // mlp-teacher (weights drawn from the seed unless provided)
    int teacher_p = 2;
    int teacher_h = 2;
    std::vector<double> teacher_weights;

    // cloudy-clearsky
    SiteLocation site{41.92, 8.73};
    SolisParams solis{};
    double k_mean = 0.75;
    double k_phi = 0.9;
    double k_sigma = 0.12;

    void validate() const;
};

struct SynthResult {
    IrradianceSeries ghi;
    ClearSkySeries clearsky;
    std::string sidecar;  // generating parameters, key-value text
};

SynthResult generate(const SyntheticSpec& spec);

// Plain ARMA simulation used by the generator and by recovery tests.
// A 200-sample burn-in is discarded.
std::vector<double> simulate_arma(const std::vector<double>& phi,
                                  const std::vector<double>& theta, double intercept,
                                  double noise_sigma, std::size_t n, std::uint64_t seed);

}  // namespace skycast
