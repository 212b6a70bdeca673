#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "levyspec/montecarlo.hpp"
#include "levyspec/operators.hpp"
#include "levyspec/spectrum.hpp"
#include "levyspec/symbol.hpp"

namespace levyspec {

using json = nlohmann::json;

/// A parsed model file: dimension, triplet (when the model defines
/// one), the effective symbol, and grid defaults. Presets without a
/// measure representation (fractional, relativistic, bernstein_power)
/// carry a symbol only.
struct ModelFile {
    int dimension = 1;
    DiffusionMatrix a;
    LevyMeasure nu = LevyMeasure::zero(1);
    bool has_triplet = false;
    std::optional<std::string> preset_name;
    Symbol symbol = Symbol::laplacian(1);
    PeriodicGrid grid = PeriodicGrid::make(1, 256, 32.0);

    LevyTriplet triplet() const {
        if (!has_triplet)
            throw MismatchedModel("model has no triplet representation");
        return LevyTriplet{a, nu, dimension};
    }
};

namespace detail {

inline double get_num(const json& j, const std::string& key,
                      std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw MismatchedModel("model: missing numeric field '" + key + "'");
    }
    if (!j.at(key).is_number())
        throw MismatchedModel("model: field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline LevyMeasure parse_measure(const json& j, int d) {
    if (!j.contains("type") || !j.at("type").is_string())
        throw MismatchedModel("model: measure needs a string field 'type'");
    std::string type = j.at("type").get<std::string>();
    if (type == "zero") return LevyMeasure::zero(d);
    if (type == "atoms") {
        if (!j.contains("atoms") || !j.at("atoms").is_array())
            throw MismatchedModel("model: atom measure needs an 'atoms' array");
        std::vector<Atom> atoms;
        for (const auto& item : j.at("atoms")) {
            Atom a;
            if (!item.contains("y") || !item.at("y").is_array() ||
                item.at("y").size() != static_cast<std::size_t>(d))
                throw MismatchedModel(
                    "model: each atom needs a 'y' array of length d");
            a.y[0] = item.at("y")[0].get<double>();
            if (d == 2) a.y[1] = item.at("y")[1].get<double>();
            a.w = get_num(item, "w");
            atoms.push_back(a);
        }
        if (j.value("symmetrize", false))
            return symmetrize_atoms(d, atoms);
        return LevyMeasure::atoms(d, canonicalize_atoms(std::move(atoms)));
    }
    if (type == "stable")
        return LevyMeasure::stable(d, get_num(j, "alpha"),
                                   get_num(j, "scale", 1.0));
    if (type == "radial") {
        if (!j.contains("family") || !j.at("family").is_string())
            throw MismatchedModel(
                "model: radial measure needs a string field 'family'");
        std::string family = j.at("family").get<std::string>();
        double amp = get_num(j, "amplitude", 1.0);
        double rate = get_num(j, "rate");
        if (!(rate > 0.0))
            throw MismatchedModel("model: radial rate must be positive");
        if (family == "exponential") {
            auto rho = [amp, rate](double r) { return amp * std::exp(-rate * r); };
            return LevyMeasure::radial(
                d, rho, static_cast<double>(-d),
                TailDecay{TailDecay::Kind::Exponential, amp, rate});
        }
        if (family == "tempered_stable") {
            double alpha = get_num(j, "alpha");
            if (!(alpha > 0.0 && alpha < 2.0))
                throw MismatchedModel(
                    "model: tempered stable alpha must lie in (0, 2)");
            double p = -(d + alpha);
            auto rho = [amp, rate, p](double r) {
                return amp * std::pow(r, p) * std::exp(-rate * r);
            };
            return LevyMeasure::radial(
                d, rho, alpha,
                TailDecay{TailDecay::Kind::Exponential, amp, rate});
        }
        throw MismatchedModel("model: unknown radial family '" + family + "'");
    }
    throw MismatchedModel("model: unknown measure type '" + type + "'");
}

inline Symbol preset_symbol(const json& p, int d, const LevyMeasure& nu) {
    if (!p.contains("name") || !p.at("name").is_string())
        throw MismatchedModel("model: preset needs a string field 'name'");
    std::string name = p.at("name").get<std::string>();
    if (name == "laplacian") return Symbol::laplacian(d);
    if (name == "fractional") return Symbol::fractional(d, get_num(p, "alpha"));
    if (name == "relativistic") return Symbol::relativistic(d, get_num(p, "b"));
    if (name == "bernstein_power")
        return Symbol::bernstein(
            d, BernsteinFunction::power(get_num(p, "exponent")));
    if (name == "compound_poisson") {
        if (!nu.is_atoms())
            throw MismatchedModel(
                "model: compound_poisson preset needs an atom measure");
        return Symbol::compound_poisson(d, nu.as_atoms().atoms);
    }
    if (name == "stable") {
        auto nu_s = LevyMeasure::stable(d, get_num(p, "alpha"),
                                        get_num(p, "scale", 1.0));
        return quadrature_symbol(
            LevyTriplet{DiffusionMatrix::zero(d), nu_s, d});
    }
    throw MismatchedModel("model: unknown preset '" + name + "'");
}

}  // namespace detail

inline ModelFile parse_model(const json& j) {
    ModelFile m;
    double dim = detail::get_num(j, "dimension");
    if (dim != 1.0 && dim != 2.0)
        throw MismatchedModel("model: dimension must be 1 or 2");
    m.dimension = static_cast<int>(dim);

    m.a = DiffusionMatrix::zero(m.dimension);
    if (j.contains("diffusion")) {
        const auto& rows = j.at("diffusion");
        if (!rows.is_array() ||
            rows.size() != static_cast<std::size_t>(m.dimension))
            throw MismatchedModel("model: diffusion must be a d x d matrix");
        for (int i = 0; i < m.dimension; ++i) {
            if (!rows[i].is_array() ||
                rows[i].size() != static_cast<std::size_t>(m.dimension))
                throw MismatchedModel("model: diffusion must be a d x d matrix");
            for (int k = 0; k < m.dimension; ++k)
                m.a.e[i][k] = rows[i][k].get<double>();
        }
    }

    m.nu = LevyMeasure::zero(m.dimension);
    if (j.contains("measure")) m.nu = detail::parse_measure(j.at("measure"), m.dimension);

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        m.grid = PeriodicGrid::make(
            m.dimension, static_cast<int>(detail::get_num(g, "n", 256.0)),
            detail::get_num(g, "L", 32.0));
    } else {
        m.grid = PeriodicGrid::make(m.dimension, 256, 32.0);
    }

    if (j.contains("preset")) {
        m.preset_name = j.at("preset").value("name", "");
        m.symbol = detail::preset_symbol(j.at("preset"), m.dimension, m.nu);
        if (*m.preset_name == "laplacian") {
            m.a = DiffusionMatrix::identity(m.dimension);
            m.nu = LevyMeasure::zero(m.dimension);
            m.has_triplet = true;
        } else if (*m.preset_name == "compound_poisson") {
            m.a = DiffusionMatrix::zero(m.dimension);
            m.has_triplet = true;
        } else if (*m.preset_name == "stable") {
            m.a = DiffusionMatrix::zero(m.dimension);
            m.nu = m.symbol.source_triplet()->nu;
            m.has_triplet = true;
        }
        return m;
    }

    LevyTriplet t{m.a, m.nu, m.dimension};
    auto rep = validate_triplet(t);
    if (!rep.ok) {
        std::string msg = "model: invalid triplet:";
        for (const auto& v : rep.violations) msg += " [" + v + "]";
        throw MismatchedModel(msg);
    }
    m.has_triplet = true;
    m.symbol = quadrature_symbol(t);
    return m;
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MismatchedModel("model: cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw MismatchedModel(std::string("model: JSON parse error: ") + e.what());
    }
    return parse_model(j);
}

/// Sampler matching the model's law; UnsupportedMeasure when no exact
/// sampler exists for the variant.
inline SamplerSpec sampler_from_model(const ModelFile& m, double t,
                                      std::size_t N, std::uint64_t seed) {
    if (m.preset_name) {
        const std::string& name = *m.preset_name;
        if (name == "laplacian")
            return SamplerSpec::brownian(DiffusionMatrix::identity(m.dimension),
                                         t, N, seed);
        if (name == "fractional")
            return SamplerSpec::stable(m.dimension, m.symbol.alpha(), 1.0, t, N,
                                       seed);
        if (name == "bernstein_power") {
            // eta(u) = |u|^{2p} is the subordinated-Brownian law
            return SamplerSpec::subordinated_bm(
                m.dimension, m.symbol.bernstein_function()->exponent(), t, N,
                seed);
        }
        if (name == "compound_poisson")
            return SamplerSpec::compound_poisson(
                m.dimension, m.nu.as_atoms().atoms, t, N, seed);
        if (name == "stable") {
            double alpha = m.nu.as_stable().alpha;
            double scale_eff = m.symbol(m.dimension == 1 ? vec1(1.0)
                                                         : vec2(1.0, 0.0));
            return SamplerSpec::stable(m.dimension, alpha, scale_eff, t, N,
                                       seed);
        }
        throw UnsupportedMeasure("no exact sampler for preset '" + name + "'");
    }
    if (!m.has_triplet)
        throw UnsupportedMeasure("model has no samplable representation");
    if (m.nu.is_zero())
        return SamplerSpec::brownian(m.a, t, N, seed);
    if (!m.a.is_zero())
        throw UnsupportedMeasure(
            "no sampler for mixed diffusion + jump triplets");
    if (m.nu.is_atoms())
        return SamplerSpec::compound_poisson(m.dimension,
                                             m.nu.as_atoms().atoms, t, N, seed);
    if (m.nu.is_stable()) {
        double alpha = m.nu.as_stable().alpha;
        double scale_eff =
            m.symbol(m.dimension == 1 ? vec1(1.0) : vec2(1.0, 0.0));
        return SamplerSpec::stable(m.dimension, alpha, scale_eff, t, N, seed);
    }
    throw UnsupportedMeasure("no exact sampler for a general radial density");
}

// ---------------------------------------------------------------------
// report serialization

inline json to_json(const SpectrumReport& rep) {
    json j;
    switch (rep.classification) {
        case SpectrumReport::Classification::HalfLine:
            j["classification"] = "half_line";
            break;
        case SpectrumReport::Classification::Interval:
            j["classification"] = "interval";
            j["K_hat"] = rep.K_hat;
            break;
        case SpectrumReport::Classification::Inconclusive:
            j["classification"] = "inconclusive";
            j["lower_bound"] = rep.lower_bound;
            break;
    }
    j["proposition_check"] = rep.proposition_check;
    j["evidence"] = {{"rule", rep.evidence.rule},
                     {"sup_source", rep.evidence.sup_source},
                     {"box_halfwidth", rep.evidence.box_halfwidth},
                     {"grid_points", rep.evidence.grid_points}};
    return j;
}

inline json to_json(const EigenOracleReport& rep) {
    return json{{"n", rep.n},
                {"matrix_dim", rep.matrix_dim},
                {"max_mismatch", rep.max_mismatch}};
}

inline const char* variant_name(SamplerSpec::Variant v) {
    switch (v) {
        case SamplerSpec::Variant::Brownian: return "brownian";
        case SamplerSpec::Variant::CompoundPoisson: return "compound_poisson";
        case SamplerSpec::Variant::StableSymmetric: return "stable_symmetric";
        case SamplerSpec::Variant::SubordinatedBM: return "subordinated_bm";
    }
    return "";
}

inline json to_json(const SamplerSpec& s, const CfReport& cf,
                    const McSemigroupReport* sg) {
    json tests = json::array();
    for (const auto& c : cf.checks) {
        json entry;
        entry["name"] = "characteristic_function";
        entry["u"] = s.d == 1 ? json{c.u[0]} : json{c.u[0], c.u[1]};
        entry["statistic"] = std::max(std::abs(c.z_real), std::abs(c.z_imag));
        entry["tolerance"] = 4.0;
        entry["pass"] = std::abs(c.z_real) <= 4.0 && std::abs(c.z_imag) <= 4.0;
        entry["ecf_re"] = c.ecf.real();
        entry["expected"] = c.expected;
        tests.push_back(entry);
    }
    bool pass = cf.pass;
    if (sg) {
        for (const auto& p : sg->points) {
            json entry;
            entry["name"] = "semigroup";
            entry["x"] = s.d == 1 ? json{p.x[0]} : json{p.x[0], p.x[1]};
            entry["statistic"] = std::abs(p.z);
            entry["tolerance"] = 4.0;
            entry["pass"] = std::abs(p.z) <= 4.0;
            tests.push_back(entry);
        }
        pass = pass && sg->pass;
        if (sg->wrap_warning) {
            json entry;
            entry["name"] = "wrap_mass";
            entry["statistic"] = sg->wrap_fraction;
            entry["tolerance"] = 0.01;
            entry["pass"] = false;
            tests.push_back(entry);
        }
    }
    return json{{"variant", variant_name(s.variant)},
                {"t", s.t},
                {"N", s.N},
                {"seed", s.seed},
                {"tests", tests},
                {"pass", pass}};
}

}  // namespace levyspec
