#include "skycast/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "skycast/errors.hpp"

namespace skycast {

namespace {

constexpr const char* kMagic = "skycast-model 1";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt(v[i]);
    }
    return out;
}

class Fields {
public:
    Fields(const std::string& text, std::string source) : source_(std::move(source)) {
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (lineno == 1) {
                if (line != kMagic) {
                    throw DataError(source_ + ": not a skycast model document");
                }
                continue;
            }
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ParseError(source_, lineno, "expected 'key = value'");
            }
            auto trim = [](std::string s) {
                while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
                while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
                return s;
            };
            fields_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
    }

    const std::string& str(const std::string& key) const {
        const auto it = fields_.find(key);
        if (it == fields_.end()) {
            throw DataError(source_ + ": missing field '" + key + "'");
        }
        return it->second;
    }

    double num(const std::string& key) const {
        const std::string& s = str(key);
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str()) throw DataError(source_ + ": bad number in '" + key + "'");
        return v;
    }

    long long integer(const std::string& key) const {
        return static_cast<long long>(num(key));
    }

    bool boolean(const std::string& key) const {
        const std::string& s = str(key);
        if (s == "true") return true;
        if (s == "false") return false;
        throw DataError(source_ + ": bad boolean in '" + key + "'");
    }

    std::vector<double> vec(const std::string& key, std::size_t expected) const {
        std::istringstream in(str(key));
        std::vector<double> out;
        double v;
        while (in >> v) out.push_back(v);
        if (out.size() != expected) {
            throw DataError(source_ + ": field '" + key + "' expected " +
                            std::to_string(expected) + " values, got " +
                            std::to_string(out.size()));
        }
        return out;
    }

private:
    std::string source_;
    std::map<std::string, std::string> fields_;
};

}  // namespace

std::string serialize_model(const arma::ArmaModel& m, const std::string& name) {
    std::ostringstream os;
    os << kMagic << "\n";
    os << "type = arma\n";
    os << "name = " << name << "\n";
    os << "bic_convention = " << kBicConventionPerObservation << "\n";
    os << "p = " << m.spec.p << "\n";
    os << "q = " << m.spec.q << "\n";
    os << "n_train = " << m.n_train << "\n";
    os << "phi0 = " << fmt(m.phi0) << "\n";
    if (!m.phi.empty()) os << "phi = " << fmt(m.phi) << "\n";
    if (!m.theta.empty()) os << "theta = " << fmt(m.theta) << "\n";
    os << "sigma2 = " << fmt(m.sigma2) << "\n";
    os << "css = " << fmt(m.css) << "\n";
    os << "bic = " << fmt(arma::bic(m)) << "\n";
    os << "converged = " << (m.converged ? "true" : "false") << "\n";
    os << "iterations = " << m.iterations << "\n";
    os << "ar_stationary = " << (m.ar_stationary ? "true" : "false") << "\n";
    os << "ma_invertible = " << (m.ma_invertible ? "true" : "false") << "\n";
    return os.str();
}

std::string serialize_model(const nn::MlpModel& m, const std::string& name,
                            bool bic_uses_effective_params) {
    std::ostringstream os;
    os << kMagic << "\n";
    os << "type = nn\n";
    os << "name = " << name << "\n";
    os << "bic_convention = " << kBicConventionPerObservation << "\n";
    os << "p = " << m.spec.p << "\n";
    os << "h = " << m.spec.h << "\n";
    os << "n_train = " << m.n_train << "\n";
    os << "seed = " << m.seed << "\n";
    os << "reg_alpha = " << fmt(m.reg_alpha) << "\n";
    os << "reg_beta = " << fmt(m.reg_beta) << "\n";
    os << "gamma_eff = " << fmt(m.gamma_eff) << "\n";
    os << "sigma2 = " << fmt(m.sigma2) << "\n";
    os << "bic_uses_effective_params = " << (bic_uses_effective_params ? "true" : "false")
       << "\n";
    os << "bic = " << fmt(nn::bic(m, bic_uses_effective_params)) << "\n";
    os << "converged = " << (m.converged ? "true" : "false") << "\n";
    os << "outer_iterations = " << m.outer_iterations << "\n";
    os << "scaling_mean = " << fmt(m.scaling.mean) << "\n";
    os << "scaling_std = " << fmt(m.scaling.stddev) << "\n";
    os << "weights = " << fmt(m.weights) << "\n";
    return os.str();
}

LoadedModel parse_model_document(const std::string& text, const std::string& source) {
    const Fields f(text, source);
    LoadedModel out;
    out.type = f.str("type");
    out.name = f.str("name");
    out.bic_convention = f.str("bic_convention");
    out.bic = f.num("bic");

    if (out.type == "arma") {
        arma::ArmaModel m;
        m.spec.p = static_cast<int>(f.integer("p"));
        m.spec.q = static_cast<int>(f.integer("q"));
        m.n_train = static_cast<std::size_t>(f.integer("n_train"));
        m.n_params = 1 + m.spec.p + m.spec.q;
        m.phi0 = f.num("phi0");
        m.phi = m.spec.p ? f.vec("phi", m.spec.p) : std::vector<double>{};
        m.theta = m.spec.q ? f.vec("theta", m.spec.q) : std::vector<double>{};
        m.sigma2 = f.num("sigma2");
        m.css = f.num("css");
        m.converged = f.boolean("converged");
        m.iterations = static_cast<int>(f.integer("iterations"));
        m.ar_stationary = f.boolean("ar_stationary");
        m.ma_invertible = f.boolean("ma_invertible");
        out.arma_model = std::move(m);
    } else if (out.type == "nn") {
        nn::MlpModel m;
        m.spec.p = static_cast<int>(f.integer("p"));
        m.spec.h = static_cast<int>(f.integer("h"));
        m.n_train = static_cast<std::size_t>(f.integer("n_train"));
        m.seed = static_cast<std::uint64_t>(f.integer("seed"));
        m.reg_alpha = f.num("reg_alpha");
        m.reg_beta = f.num("reg_beta");
        m.gamma_eff = f.num("gamma_eff");
        m.sigma2 = f.num("sigma2");
        m.converged = f.boolean("converged");
        m.outer_iterations = static_cast<int>(f.integer("outer_iterations"));
        m.scaling.mean = f.vec("scaling_mean", m.spec.p);
        m.scaling.stddev = f.vec("scaling_std", m.spec.p);
        m.weights = f.vec("weights", m.spec.n_params());
        out.bic_uses_effective_params = f.boolean("bic_uses_effective_params");
        out.nn_model = std::move(m);
    } else {
        throw DataError(source + ": unknown model type '" + out.type + "'");
    }
    return out;
}

LoadedModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_document(ss.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file '" + path + "'");
    out << text;
}

}  // namespace skycast
