#include "ergodic/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <locale>
#include <numeric>
#include <random>
#include <sstream>

#include "ergodic/errors.hpp"
#include "ergodic/kernel.hpp"
#include "ergodic/measure_designer.hpp"

namespace ergodic {

using nlohmann::json;

namespace {

using Path = std::vector<std::string>;

// ---------------------------------------------------------------- diagnostics

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const Path& path, const std::string& msg) const {
        std::string p;
        for (const std::string& k : path) p += "/" + k;
        throw ConfigError("config field " + (p.empty() ? std::string("/") : p) + where(path) + ": " + msg);
    }

    const json& require(const json& obj, const Path& path, const std::string& key) const {
        if (!obj.is_object() || !obj.contains(key)) fail(child(path, key), "missing required field");
        return obj.at(key);
    }

    double number(const json& obj, const Path& path, const std::string& key, std::optional<double> dflt = {}) const {
        if (!obj.contains(key)) {
            if (dflt) return *dflt;
            fail(child(path, key), "missing required number");
        }
        const json& v = obj.at(key);
        if (!v.is_number()) fail(child(path, key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(child(path, key), "expected a finite number");
        return x;
    }

    long long integer(const json& obj, const Path& path, const std::string& key, std::optional<long long> dflt = {}) const {
        if (!obj.contains(key)) {
            if (dflt) return *dflt;
            fail(child(path, key), "missing required integer");
        }
        const json& v = obj.at(key);
        if (!v.is_number_integer()) fail(child(path, key), "expected an integer");
        return v.get<long long>();
    }

    std::string string(const json& obj, const Path& path, const std::string& key) const {
        const json& v = require(obj, path, key);
        if (!v.is_string()) fail(child(path, key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const json& v, const Path& path) const {
        if (!v.is_array()) fail(path, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(child(path, std::to_string(i)), "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    void only_keys(const json& obj, const Path& path, std::initializer_list<const char*> allowed) const {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
                fail(child(path, it.key()), "unknown field");
            }
        }
    }

    static Path child(Path p, std::string key) {
        p.push_back(std::move(key));
        return p;
    }

private:
    // Best-effort source line: follow the path's keys through the text.
    std::string where(const Path& path) const {
        std::size_t pos = 0;
        bool found = false;
        for (const std::string& k : path) {
            if (!k.empty() && std::all_of(k.begin(), k.end(), ::isdigit)) continue;
            const std::size_t p = text_.find("\"" + k + "\"", pos);
            if (p == std::string::npos) break;
            pos = p;
            found = true;
        }
        if (!found) return "";
        return " (line " + std::to_string(1 + std::count(text_.begin(), text_.begin() + pos, '\n')) + ")";
    }

    const std::string& text_;
};

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(17);
    s << x;
    return s.str();
}

std::string short_number(double x) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(4);
    s << x;
    return s.str();
}

json number_json(double x) {
    if (std::isfinite(x)) return x;
    return format_number(x);
}

// ---------------------------------------------------------------- registry

const std::vector<std::pair<std::string, std::string>> kAliases = {
    {"identity", "lemma13_identity"}, {"thm16", "thm16_exponents"},     {"vnet", "thm11_vnet"},
    {"gap", "thm12_gap_bound"},       {"majorant", "lemma31_majorant"}, {"corollary", "cor18"},
};

bool needs_measure(const std::string& id) {
    return id == "lemma31_majorant" || id == "sec31_lower_bound" || id == "thm15_forward" ||
           id == "thm15_reverse" || id == "thm16_exponents" || id == "thm17_perturbation" || id == "cor18";
}

// ---------------------------------------------------------------- builders

struct BuiltMeasure {
    CircleMeasure mu;
    std::string label;
    std::optional<double> alpha, c, gamma;
    std::optional<LacunarySpec> lacunary;
};

std::vector<Atom> parse_atoms(const Reader& rd, const json& v, const Path& path) {
    if (!v.is_array()) rd.fail(path, "expected an array of [theta, weight] pairs");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Path p = Reader::child(path, std::to_string(i));
        const std::vector<double> pair = rd.numbers(v[i], p);
        if (pair.size() != 2) rd.fail(p, "expected [theta, weight]");
        atoms.push_back({pair[0], pair[1]});
    }
    return atoms;
}

BuiltMeasure build_measure(const Reader& rd, const json& m, const Path& path) {
    if (!m.is_object()) rd.fail(path, "expected an object");
    BuiltMeasure out;
    try {
        if (m.contains("kind")) {
            out.mu = measure_from_json(m);
            out.label = "measure (" + m.at("kind").get<std::string>() + ")";
            return out;
        }
        const std::string type = rd.string(m, path, "type");
        if (type == "power_law") {
            rd.only_keys(m, path, {"type", "alpha", "c"});
            const double alpha = rd.number(m, path, "alpha");
            if (!(alpha > 0.0)) rd.fail(Reader::child(path, "alpha"), "power law exponent must be positive");
            const double c = rd.number(m, path, "c", alpha / (2.0 * std::pow(kPi, alpha)));
            out.mu = power_law_measure(alpha, c);
            out.alpha = alpha;
            out.c = c;
            out.label = "power_law(alpha=" + short_number(alpha) + ")";
        } else if (type == "lacunary") {
            rd.only_keys(m, path,
                         {"type", "a", "b", "depth", "first_scale_bits", "ramp", "comb_per_octave", "floor_bits",
                          "background"});
            LacunarySpec s;
            s.low_exponent = rd.number(m, path, "a", s.low_exponent);
            s.high_exponent = rd.number(m, path, "b", s.high_exponent);
            s.depth = static_cast<int>(rd.integer(m, path, "depth", s.depth));
            s.first_scale_bits = rd.number(m, path, "first_scale_bits", s.first_scale_bits);
            s.ramp = rd.number(m, path, "ramp", s.ramp);
            s.comb_per_octave = rd.number(m, path, "comb_per_octave", s.comb_per_octave);
            s.floor_bits = rd.number(m, path, "floor_bits", s.floor_bits);
            s.background = rd.number(m, path, "background", s.background);
            out.mu = lacunary_measure(s);
            out.lacunary = s;
            out.label = "lacunary(a=" + short_number(s.low_exponent) + ", b=" + short_number(s.high_exponent) +
                        ", depth=" + std::to_string(s.depth) + ")";
        } else if (type == "gap") {
            rd.only_keys(m, path, {"type", "gamma", "atoms"});
            const double gamma = rd.number(m, path, "gamma");
            out.mu = gap_measure(gamma, parse_atoms(rd, rd.require(m, path, "atoms"), Reader::child(path, "atoms")));
            out.gamma = gamma;
            out.label = "gap(gamma=" + short_number(gamma) + ")";
        } else {
            rd.fail(Reader::child(path, "type"), "unknown measure type '" + type + "' (power_law, lacunary, gap)");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rd.fail(path, e.what());
    }
    return out;
}

struct BuiltModel {
    Model model;
    std::string label;
    std::optional<double> gamma;
};

BuiltModel build_model(const Reader& rd, const json& m, const Path& path, std::uint64_t seed) {
    if (!m.is_object()) rd.fail(path, "expected an object");
    BuiltModel out;
    const std::string type = rd.string(m, path, "type");
    try {
        if (type == "diagonal") {
            rd.only_keys(m, path, {"type", "phases", "psi"});
            const std::vector<double> phases = rd.numbers(rd.require(m, path, "phases"), Reader::child(path, "phases"));
            const json& psi = rd.require(m, path, "psi");
            if (!psi.is_array()) rd.fail(Reader::child(path, "psi"), "expected an array of [re, im] pairs");
            std::vector<Complex> coeffs;
            for (std::size_t i = 0; i < psi.size(); ++i) {
                const Path p = Reader::child(Reader::child(path, "psi"), std::to_string(i));
                const std::vector<double> z = rd.numbers(psi[i], p);
                if (z.size() != 2) rd.fail(p, "expected [re, im]");
                coeffs.emplace_back(z[0], z[1]);
            }
            if (coeffs.size() != phases.size()) {
                rd.fail(Reader::child(path, "psi"), "psi has " + std::to_string(coeffs.size()) +
                                                        " entries but there are " + std::to_string(phases.size()) +
                                                        " phases");
            }
            out.model = DiagonalModel{DiagonalUnitary(phases), StateVector(coeffs)};
            out.label = "diagonal(dim=" + std::to_string(phases.size()) + ")";
        } else if (type == "random_diagonal") {
            rd.only_keys(m, path, {"type", "dim", "gamma", "fixed_fraction"});
            const long long dim = rd.integer(m, path, "dim");
            if (dim < 1 || dim > 1000000) rd.fail(Reader::child(path, "dim"), "dimension must lie in [1, 10^6]");
            const double fixed = rd.number(m, path, "fixed_fraction", 0.1);
            if (!(fixed >= 0.0) || fixed > 1.0) rd.fail(Reader::child(path, "fixed_fraction"), "must lie in [0, 1]");
            std::optional<double> gamma;
            if (m.contains("gamma")) {
                gamma = rd.number(m, path, "gamma");
                if (!(*gamma > 0.0) || !(*gamma < kPi)) rd.fail(Reader::child(path, "gamma"), "must lie in (0, pi)");
            }
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            std::normal_distribution<double> gauss;
            std::vector<double> phases;
            std::vector<Complex> coeffs;
            double norm = 0.0;
            for (long long k = 0; k < dim; ++k) {
                double t = 0.0;
                if (unit(rng) >= fixed) {
                    const double lo = gamma.value_or(0.0);
                    // |t| in (lo, pi] with a random sign; -lo itself is never drawn
                    t = kPi - (kPi - lo) * unit(rng);
                    if (t <= lo) t = kPi;
                    if (unit(rng) < 0.5 && t != kPi) t = -t;
                }
                phases.push_back(t);
                coeffs.emplace_back(gauss(rng), gauss(rng));
                norm += std::norm(coeffs.back());
            }
            for (Complex& c : coeffs) c /= std::sqrt(norm);
            out.model = DiagonalModel{DiagonalUnitary(phases), StateVector(coeffs)};
            out.gamma = gamma;
            out.label = "random_diagonal(dim=" + std::to_string(dim) + ", seed=" + std::to_string(seed) + ")";
        } else if (type == "koopman") {
            rd.only_keys(m, path, {"type", "map", "alpha", "observable"});
            const std::string map = rd.string(m, path, "map");
            const json& obs = rd.require(m, path, "observable");
            if (!obs.is_array()) rd.fail(Reader::child(path, "observable"), "expected an array of [freq, re, im]");
            std::vector<FourierMode> modes;
            for (std::size_t i = 0; i < obs.size(); ++i) {
                const Path p = Reader::child(Reader::child(path, "observable"), std::to_string(i));
                if (!obs[i].is_array() || obs[i].size() != 3 || !obs[i][0].is_number_integer()) {
                    rd.fail(p, "expected [integer frequency, re, im]");
                }
                const std::vector<double> amp = rd.numbers(json::array({obs[i][1], obs[i][2]}), p);
                modes.push_back({obs[i][0].get<long long>(), Complex(amp[0], amp[1])});
            }
            if (map == "rotation") {
                out.model = KoopmanModel{KoopmanInstance::rotation(rd.number(m, path, "alpha"), modes)};
            } else if (map == "doubling") {
                out.model = KoopmanModel{KoopmanInstance::doubling(modes)};
            } else if (map == "bernoulli") {
                out.model = KoopmanModel{KoopmanInstance::bernoulli(modes)};
            } else {
                rd.fail(Reader::child(path, "map"), "unknown map '" + map + "' (rotation, doubling, bernoulli)");
            }
            out.label = "koopman(" + map + ")";
        } else {
            rd.fail(Reader::child(path, "type"),
                    "unknown model type '" + type + "' (diagonal, random_diagonal, koopman)");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rd.fail(path, e.what());
    }
    return out;
}

GridSpec parse_grid(const Reader& rd, const json& g, const Path& path, GridSpec dflt) {
    if (!g.is_object()) rd.fail(path, "expected {min_exp, max_exp, base}");
    rd.only_keys(g, path, {"min_exp", "max_exp", "base", "count", "spacing"});
    GridSpec s = dflt;
    s.min_exp = rd.number(g, path, "min_exp");
    s.max_exp = rd.number(g, path, "max_exp");
    s.base = rd.number(g, path, "base", 2.0);
    s.count = static_cast<int>(rd.integer(g, path, "count", 0));
    s.spacing = Spacing::linear;
    if (g.contains("spacing")) {
        const std::string sp = rd.string(g, path, "spacing");
        if (sp == "geometric") {
            s.spacing = Spacing::geometric;
        } else if (sp != "linear") {
            rd.fail(Reader::child(path, "spacing"), "expected 'linear' or 'geometric'");
        }
    }
    return s;
}

bool has_density(const Model& m) {
    if (const auto* s = std::get_if<SpectralModel>(&m)) return s->mu.has_density();
    return false;
}

std::vector<double> param_list(const json& params, const std::string& key, std::vector<double> dflt) {
    if (!params.contains(key)) return dflt;
    return params.at(key).get<std::vector<double>>();
}

double param(const json& params, const std::string& key, double dflt) {
    return params.contains(key) ? params.at(key).get<double>() : dflt;
}

}  // namespace

// ---------------------------------------------------------------- registry

const std::vector<CheckInfo>& check_registry() {
    static const std::vector<CheckInfo> registry = [] {
        std::vector<CheckInfo> r = {
            {"cor18", "slow and fast decay subsequences force d- = 0 and d+ >= 2"},
            {"lemma13_identity", "direct Cesaro deviation equals the Fejer functional of the spectral measure"},
            {"lemma31_majorant", "Fejer functional bounded by the sector-mass majorant"},
            {"prop23_weak_decay", "correlations of absolutely continuous spectra decay (Riemann-Lebesgue)"},
            {"sec31_lower_bound", "b(K) >= mu(A_eps)/4 at eps = 1/(2K)"},
            {"thm11_vnet", "Cesaro averages converge to the fixed part (von Neumann)"},
            {"thm12_gap_bound", "spectral gap gamma gives |D_K|/K <= 1/(K sin(gamma/2)) <= 4/(gamma K)"},
            {"thm15_forward", "arc bound mu(A_eps) <= C eps^alpha implies b(K) <= C'/K^alpha"},
            {"thm15_reverse", "decay bound b(K) <= C/K^alpha implies mu(A_eps) <= C' eps^alpha"},
            {"thm16_exponents", "decay exponents equal the pointwise exponents d-, d+ of the spectral measure"},
            {"thm17_perturbation", "psi + eta/m keeps K^eps b(K) unbounded (slow-decay density)"},
            {"thm17_truncation", "truncated vectors decay like 16 n^2 ||psi_n||^2 / K^2 and approximate psi"},
        };
        std::sort(r.begin(), r.end(), [](const CheckInfo& a, const CheckInfo& b) { return a.id < b.id; });
        return r;
    }();
    return registry;
}

std::string resolve_check(const std::string& id) {
    for (const CheckInfo& c : check_registry()) {
        if (c.id == id) return id;
    }
    for (const auto& [alias, target] : kAliases) {
        if (alias == id) return target;
    }
    return "";
}

// ---------------------------------------------------------------- measure json

json measure_to_json(const CircleMeasure& mu) {
    json j;
    switch (mu.kind()) {
        case MeasureKind::atomic: {
            j["kind"] = "atomic";
            json atoms = json::array();
            for (const Atom& a : mu.atoms()) atoms.push_back({a.angle, a.weight});
            j["atoms"] = atoms;
            break;
        }
        case MeasureKind::density: {
            j["kind"] = "density";
            json segs = json::array();
            for (const PowerSegment& s : mu.segments()) {
                segs.push_back({{"c", s.c}, {"alpha", s.alpha}, {"from", s.from}, {"to", s.to}});
            }
            j["segments"] = segs;
            break;
        }
        case MeasureKind::mixture: {
            j["kind"] = "mixture";
            json parts = json::array();
            for (const CircleMeasure& p : mu.parts()) parts.push_back(measure_to_json(p));
            j["parts"] = parts;
            break;
        }
    }
    return j;
}

CircleMeasure measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw UsageError("measure JSON needs a string field 'kind'");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "atomic") {
        std::vector<Atom> atoms;
        for (const json& a : j.value("atoms", json::array())) {
            if (!a.is_array() || a.size() != 2) throw UsageError("atoms must be [theta, weight] pairs");
            atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
        return CircleMeasure::atomic(std::move(atoms));
    }
    if (kind == "density") {
        std::vector<PowerSegment> segs;
        for (const json& s : j.value("segments", json::array())) {
            segs.push_back({s.at("c").get<double>(), s.at("alpha").get<double>(), s.at("from").get<double>(),
                            s.at("to").get<double>()});
        }
        return CircleMeasure::density(std::move(segs));
    }
    if (kind == "mixture") {
        std::vector<CircleMeasure> parts;
        for (const json& p : j.value("parts", json::array())) parts.push_back(measure_from_json(p));
        return CircleMeasure::mixture(std::move(parts));
    }
    throw UsageError("unknown measure kind '" + kind + "' (atomic, density, mixture)");
}

json report_to_json(const VerificationReport& r) {
    json j;
    j["claim"] = r.claim;
    j["holds"] = r.holds;
    j["worst_margin"] = number_json(r.worst_margin);
    j["witness"] = number_json(r.witness);
    j["witness_kind"] = r.witness_kind;
    json c = json::object();
    for (const auto& [k, v] : r.constants) c[k] = number_json(v);
    j["constants"] = c;
    if (r.advisory) j["advisory"] = *r.advisory;
    return j;
}

// ---------------------------------------------------------------- config

ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
        throw ConfigError("config is not valid JSON (line " + std::to_string(line) + "): " + e.what());
    }
    const Reader rd(text);
    if (!doc.is_object()) rd.fail({}, "config must be a JSON object");
    rd.only_keys(doc, {}, {"measure", "model", "K_grid", "eps_grid", "checks", "params", "output", "seed"});

    ExperimentConfig cfg;
    if (doc.contains("seed")) {
        const long long s = rd.integer(doc, {}, "seed");
        if (s < 0) rd.fail({"seed"}, "seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (overrides.seed) cfg.seed = *overrides.seed;

    if (doc.contains("params")) {
        if (!doc.at("params").is_object()) rd.fail({"params"}, "expected an object");
        cfg.params = doc.at("params");
    }

    const bool has_measure = doc.contains("measure");
    const bool has_model = doc.contains("model");
    if (has_measure == has_model) rd.fail({}, "exactly one of 'measure' or 'model' is required");

    std::optional<LacunarySpec> lacunary;
    std::optional<double> gamma;
    if (has_measure) {
        BuiltMeasure b = build_measure(rd, doc.at("measure"), {"measure"});
        cfg.model = SpectralModel{std::move(b.mu)};
        cfg.model_label = b.label;
        cfg.power_law_alpha = b.alpha;
        cfg.power_law_c = b.c;
        lacunary = b.lacunary;
        gamma = b.gamma;
    } else {
        BuiltModel b = build_model(rd, doc.at("model"), {"model"}, cfg.seed);
        cfg.model = std::move(b.model);
        cfg.model_label = b.label;
        gamma = b.gamma;
    }

    // Lacunary witnesses need horizons past the deepest dip; default to a
    // geometric exponent grid down to the comb floor.
    GridSpec k_default{4, 20, 2};
    GridSpec e_default{4, 40, 2};
    if (lacunary) {
        k_default = GridSpec{1, lacunary_floor_bits(*lacunary), 2, 96, Spacing::geometric};
        e_default = k_default;
    }
    try {
        const GridSpec kg = doc.contains("K_grid") ? parse_grid(rd, doc.at("K_grid"), {"K_grid"}, k_default) : k_default;
        cfg.K_grid = horizon_grid(kg);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rd.fail({"K_grid"}, e.what());
    }
    try {
        const GridSpec eg =
            doc.contains("eps_grid") ? parse_grid(rd, doc.at("eps_grid"), {"eps_grid"}, e_default) : e_default;
        cfg.eps_grid = radius_grid(eg);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rd.fail({"eps_grid"}, e.what());
    }
    if (has_density(cfg.model) && cfg.K_grid.back() > kMaxDensityHorizon) {
        rd.fail({"K_grid"}, "density measures support horizons up to 2^24");
    }

    const bool spectral = model_spectral_measure(cfg.model).has_value();
    if (spectral && cfg.eps_grid.size() < 8) rd.fail({"eps_grid"}, "at least 8 radii are needed for exponents");

    if (doc.contains("checks")) {
        const json& checks = doc.at("checks");
        if (!checks.is_array()) rd.fail({"checks"}, "expected an array of check identifiers");
        for (std::size_t i = 0; i < checks.size(); ++i) {
            const Path p = {"checks", std::to_string(i)};
            if (!checks[i].is_string()) rd.fail(p, "expected a string");
            const std::string raw = checks[i].get<std::string>();
            const std::string id = resolve_check(raw);
            if (id.empty()) rd.fail({"checks", raw}, "unknown check '" + raw + "' (see list-checks)");
            if (needs_measure(id) && !spectral) {
                rd.fail({"checks", raw}, "check " + id + " needs a model with a representable spectral measure");
            }
            cfg.checks.push_back(id);
        }
    }

    // Per-check parameters are resolved and type-checked up front so that a
    // bad value never leaves partial artifacts behind.
    try {
        json& P = cfg.params;
        for (const char* key : {"alpha", "gamma", "perturbation_eps", "tail_fraction", "exponent_tolerance",
                                "property_eps", "corollary_tolerance", "growth_factor"}) {
            if (P.contains(key) && !P.at(key).is_number()) rd.fail({"params", key}, "expected a number");
        }
        for (const char* key : {"ns", "m_grid"}) {
            if (P.contains(key)) (void)rd.numbers(P.at(key), {"params", key});
        }
        if (!P.contains("alpha") && cfg.power_law_alpha) P["alpha"] = *cfg.power_law_alpha;
        if (!P.contains("gamma") && gamma) P["gamma"] = *gamma;
        const double tail = param(P, "tail_fraction", 0.5);
        if (!(tail > 0.0) || tail > 1.0) rd.fail({"params", "tail_fraction"}, "must lie in (0, 1]");
        for (const std::string& id : cfg.checks) {
            if ((id == "thm15_forward" || id == "thm15_reverse")) {
                if (!P.contains("alpha")) rd.fail({"params", "alpha"}, id + " needs an exponent alpha");
                const double a = P.at("alpha").get<double>();
                if (!(a > 0.0) || !(a < 2.0)) rd.fail({"params", "alpha"}, "alpha must lie in (0, 2)");
            }
            if (id == "thm12_gap_bound") {
                if (!P.contains("gamma")) rd.fail({"params", "gamma"}, "thm12_gap_bound needs a gap gamma");
                const bool finite = std::holds_alternative<DiagonalModel>(cfg.model) ||
                                    (std::holds_alternative<SpectralModel>(cfg.model) &&
                                     std::get<SpectralModel>(cfg.model).mu.kind() == MeasureKind::atomic);
                if (!finite) rd.fail({"checks", id}, "thm12_gap_bound needs a diagonal model or an atomic measure");
            }
            if (id == "thm17_truncation") {
                const bool finite = std::holds_alternative<DiagonalModel>(cfg.model) ||
                                    (std::holds_alternative<SpectralModel>(cfg.model) &&
                                     std::get<SpectralModel>(cfg.model).mu.kind() == MeasureKind::atomic);
                if (!finite) rd.fail({"checks", id}, "thm17_truncation needs a diagonal model or an atomic measure");
            }
            if (id == "thm17_perturbation") {
                const double e = param(P, "perturbation_eps", 0.3);
                if (!(e > 0.0) || !(e < 1.0)) rd.fail({"params", "perturbation_eps"}, "must lie in (0, 1)");
                if (cfg.K_grid.back() > kMaxDensityHorizon) {
                    rd.fail({"K_grid"}, "thm17_perturbation evaluates a density; horizons up to 2^24");
                }
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rd.fail({"params"}, e.what());
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        if (!o.is_object()) rd.fail({"output"}, "expected {dir, formats}");
        rd.only_keys(o, {"output"}, {"dir", "formats"});
        if (o.contains("dir")) cfg.out_dir = rd.string(o, {"output"}, "dir");
        if (o.contains("formats")) {
            const json& f = o.at("formats");
            if (!f.is_array()) rd.fail({"output", "formats"}, "expected an array");
            cfg.formats.clear();
            for (const json& x : f) {
                const std::string s = x.is_string() ? x.get<std::string>() : "";
                if (s != "csv" && s != "json" && s != "svg") {
                    rd.fail({"output", "formats"}, "formats must be drawn from csv, json, svg");
                }
                cfg.formats.insert(s);
            }
        }
    }
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    return cfg;
}

// ---------------------------------------------------------------- run

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult res;
    const json& P = cfg.params;
    const double tail = param(P, "tail_fraction", 0.5);
    try {
        res.series = decay_series(cfg.model, cfg.K_grid);
        const std::optional<CircleMeasure> mu = model_spectral_measure(cfg.model);
        if (mu) res.arc = pointwise_exponents(*mu, cfg.eps_grid, tail);

        for (const std::string& id : cfg.checks) {
            VerificationReport r;
            if (id == "lemma13_identity") {
                r = verify_identity(cfg.model, cfg.K_grid);
            } else if (id == "thm11_vnet") {
                r = verify_vnet(cfg.model, cfg.K_grid);
            } else if (id == "thm12_gap_bound") {
                std::vector<double> phases;
                if (const auto* d = std::get_if<DiagonalModel>(&cfg.model)) {
                    phases = d->U.phases();
                } else {
                    for (const Atom& a : mu->atoms()) {
                        if (a.weight > 0.0) phases.push_back(a.angle);
                    }
                }
                r = verify_spectral_gap_bound(phases, P.at("gamma").get<double>(), cfg.K_grid);
            } else if (id == "lemma31_majorant") {
                r = verify_majorant(*mu, cfg.K_grid);
            } else if (id == "sec31_lower_bound") {
                r = verify_lower_bound(*mu, res.series);
            } else if (id == "thm15_forward") {
                r = verify_kachurovskii_forward(*mu, P.at("alpha").get<double>(), cfg.K_grid, cfg.eps_grid);
            } else if (id == "thm15_reverse") {
                r = verify_kachurovskii_reverse(res.series, *mu, P.at("alpha").get<double>(), cfg.eps_grid);
            } else if (id == "thm16_exponents") {
                r = verify_exponent_match(*mu, res.series, cfg.eps_grid, param(P, "exponent_tolerance", kExponentTolerance),
                                          tail);
            } else if (id == "thm17_truncation") {
                const std::vector<double> ns = param_list(P, "ns", {1, 2, 8, 32});
                if (const auto* d = std::get_if<DiagonalModel>(&cfg.model)) {
                    r = verify_truncation(d->U, d->psi, ns, cfg.K_grid);
                } else {
                    const DiagonalModel m = diagonal_realization(*mu);
                    r = verify_truncation(m.U, m.psi, ns, cfg.K_grid);
                }
            } else if (id == "thm17_perturbation") {
                const double e = param(P, "perturbation_eps", 0.3);
                r = perturbation_construction(*mu, unit_power_law(e / 3.0), e, param_list(P, "m_grid", {1, 2, 4}),
                                              cfg.K_grid, param(P, "growth_factor", 2.0));
            } else if (id == "cor18") {
                CorollaryOptions o;
                o.property_eps = param(P, "property_eps", o.property_eps);
                o.tolerance = param(P, "corollary_tolerance", o.tolerance);
                o.tail_fraction = tail;
                r = corollary_check(*mu, res.series, cfg.eps_grid, o);
            } else if (id == "prop23_weak_decay") {
                r = verify_weak_decay(cfg.model);
            }
            res.all_hold = res.all_hold && r.holds;
            res.reports.push_back(std::move(r));
        }
    } catch (const std::exception& e) {
        throw ConfigError(std::string("configuration is incompatible with the model: ") + e.what());
    }
    return res;
}

// ---------------------------------------------------------------- artifacts

std::string decay_csv(const RateSeries& series) {
    std::string out = "K,b,log_ratio\n";
    for (const RatePoint& p : series.entries) {
        out += format_number(p.K) + "," + format_number(p.b) + "," + format_number(decay_log_ratio(p)) + "\n";
    }
    return out;
}

std::string arc_csv(const ExponentEstimate& arc) {
    std::string out = "eps,mass,log_ratio\n";
    for (const ScaleSample& s : arc.scales) {
        out += format_number(s.eps) + "," + format_number(s.mass) + "," + format_number(s.log_ratio) + "\n";
    }
    return out;
}

std::string loglog_svg(const std::vector<std::pair<double, double>>& points, const std::string& title,
                       const std::string& x_label, const std::string& y_label, const std::string& note) {
    constexpr double W = 640, H = 420, L = 80, R = 20, T = 40, B = 60;
    std::vector<std::pair<double, double>> lp;
    for (const auto& [x, y] : points) {
        if (x > 0.0 && y > 0.0 && std::isfinite(x) && std::isfinite(y)) lp.emplace_back(std::log10(x), std::log10(y));
    }
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(6);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
      << W << " " << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    if (lp.empty()) {
        s << "<text x=\"" << W / 2 << "\" y=\"" << H / 2 << "\" text-anchor=\"middle\">no positive data</text>\n</svg>\n";
        return s.str();
    }
    double x0 = lp.front().first, x1 = x0, y0 = lp.front().second, y1 = y0;
    for (const auto& [x, y] : lp) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    x0 = std::floor(x0);
    x1 = std::max(std::ceil(x1), x0 + 1);
    y0 = std::floor(y0);
    y1 = std::max(std::ceil(y1), y0 + 1);
    const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    const auto step = [](double span) { return std::max(1.0, std::ceil(span / 10.0)); };

    s << "<g stroke=\"#ddd\">\n";
    for (double x = x0; x <= x1 + 1e-9; x += step(x1 - x0)) {
        s << "<line x1=\"" << px(x) << "\" y1=\"" << T << "\" x2=\"" << px(x) << "\" y2=\"" << H - B << "\"/>\n";
    }
    for (double y = y0; y <= y1 + 1e-9; y += step(y1 - y0)) {
        s << "<line x1=\"" << L << "\" y1=\"" << py(y) << "\" x2=\"" << W - R << "\" y2=\"" << py(y) << "\"/>\n";
    }
    s << "</g>\n<g fill=\"#333\">\n";
    for (double x = x0; x <= x1 + 1e-9; x += step(x1 - x0)) {
        s << "<text x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">1e" << x << "</text>\n";
    }
    for (double y = y0; y <= y1 + 1e-9; y += step(y1 - y0)) {
        s << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">1e" << y << "</text>\n";
    }
    s << "</g>\n";
    s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
    s << "<path fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" d=\"";
    for (std::size_t i = 0; i < lp.size(); ++i) s << (i ? " L" : "M") << px(lp[i].first) << "," << py(lp[i].second);
    s << "\"/>\n";
    for (const auto& [x, y] : lp) s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2\" fill=\"#1f5fa8\"/>\n";

    // least-squares slope over the trailing half
    const std::size_t from = lp.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t i = from; i < lp.size(); ++i) {
        sx += lp[i].first;
        sy += lp[i].second;
        sxx += lp[i].first * lp[i].first;
        sxy += lp[i].first * lp[i].second;
        n += 1;
    }
    const double den = n * sxx - sx * sx;
    std::string slope = "n/a";
    if (n >= 2 && den > 0) {
        std::ostringstream t;
        t.imbue(std::locale::classic());
        t.precision(4);
        t << (n * sxy - sx * sy) / den;
        slope = t.str();
    }
    s << "<text x=\"" << L + 8 << "\" y=\"" << T + 16 << "\">tail slope " << slope << "</text>\n";
    if (!note.empty()) s << "<text x=\"" << L + 8 << "\" y=\"" << T + 30 << "\">" << note << "</text>\n";
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
    s << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (T + H - B) / 2 << ")\">" << y_label << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::vector<std::filesystem::path> write_artifacts(const ExperimentConfig& cfg, const ExperimentResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::vector<fs::path> written;
    auto put = [&](const std::string& name, const std::string& body) {
        const fs::path p = cfg.out_dir / name;
        std::ofstream f(p, std::ios::binary);
        f << body;
        if (!f) throw std::runtime_error("cannot write " + p.string());
        written.push_back(p);
    };
    if (cfg.formats.count("csv")) {
        put("decay.csv", decay_csv(result.series));
        if (result.arc) put("arc.csv", arc_csv(*result.arc));
    }
    if (cfg.formats.count("json")) {
        json reports = json::array();
        for (const VerificationReport& r : result.reports) reports.push_back(report_to_json(r));
        put("report.json", reports.dump(2) + "\n");
    }
    if (cfg.formats.count("svg")) {
        const DecayExponents d = estimate_decay_exponents(result.series, param(cfg.params, "tail_fraction", 0.5));
        std::vector<std::pair<double, double>> pts;
        for (const RatePoint& p : result.series.entries) pts.emplace_back(p.K, p.b);
        put("decay.svg", loglog_svg(pts, "b(K) for " + cfg.model_label, "K", "b(K)",
                                    "decay exponents: liminf " + short_number(d.liminf_exp) +
                                        ", limsup " + short_number(d.limsup_exp)));
        if (result.arc) {
            std::vector<std::pair<double, double>> arc;
            for (const ScaleSample& s : result.arc->scales) arc.emplace_back(s.eps, s.mass);
            put("arc.svg", loglog_svg(arc, "mu(A_eps) for " + cfg.model_label, "eps", "mu(A_eps)",
                                      "pointwise exponents: d- " + short_number(result.arc->d_minus) +
                                          ", d+ " + short_number(result.arc->d_plus)));
        }
    }
    return written;
}

}  // namespace ergodic
