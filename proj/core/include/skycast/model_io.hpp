#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "skycast/arma.hpp"
#include "skycast/mlp.hpp"

namespace skycast {

// All models emitted by this toolkit carry the same information-criterion
// convention tag; documents with a different tag cannot be mixed into one
// committee.
inline constexpr const char* kBicConventionPerObservation = "per-observation";

struct LoadedModel {
    std::string type;  // "arma" | "nn"
    std::string name;
    std::string bic_convention;
    double bic = 0.0;
    bool bic_uses_effective_params = false;  // nn only
    std::optional<arma::ArmaModel> arma_model;
    std::optional<nn::MlpModel> nn_model;
};

// Plain-text key-value documents, coefficients at full precision. The
// serialization is byte-stable: the same model always produces the same
// document.
std::string serialize_model(const arma::ArmaModel& model, const std::string& name);
std::string serialize_model(const nn::MlpModel& model, const std::string& name,
                            bool bic_uses_effective_params = false);

LoadedModel parse_model_document(const std::string& text, const std::string& source);
LoadedModel load_model_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace skycast
