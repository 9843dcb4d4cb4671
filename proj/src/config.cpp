#include "polaron/config.hpp"

#include "polaron/errors.hpp"

#include <toml.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace polaron {
namespace {

void allow_only(const toml::table& t, const std::string& where, std::initializer_list<const char*> keys) {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : t) {
        (void)v;
        if (!ok.count(std::string(k.str())))
            throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where);
    }
}

const toml::table* sub(const toml::table& root, const char* name) {
    const toml::node* n = root.get(name);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(std::string("[") + name + "] must be a table");
    return n->as_table();
}

double get_real(const toml::table& t, const char* key, double fallback, const std::string& where) {
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value<double>()) return *v;
    if (auto s = n->value<std::string>()) {
        if (*s == "inf" || *s == "infinity") return infinite_cutoff;
    }
    throw ConfigError(where + "." + key + " must be a number");
}

long long get_int(const toml::table& t, const char* key, long long fallback, const std::string& where) {
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<int64_t>()) return *v;
    throw ConfigError(where + "." + key + " must be an integer");
}

std::vector<double> get_reals(const toml::table& t, const char* key, const std::string& where) {
    const toml::node* n = t.get(key);
    std::vector<double> out;
    if (!n) return out;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(where + "." + key + " must be an array");
    for (const auto& e : *a) {
        if (auto v = e.value<double>())
            out.push_back(*v);
        else if (auto s = e.value<std::string>(); s && (*s == "inf" || *s == "infinity"))
            out.push_back(infinite_cutoff);
        else
            throw ConfigError(where + "." + key + " entries must be numbers or \"inf\"");
    }
    return out;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
        throw ConfigError(os.str());
    }
    allow_only(root, "top level", {"domain", "fock", "levels", "series", "alpha", "gross", "tolerances", "output", "run"});
    RunConfig c;
    if (const auto* t = sub(root, "domain")) {
        allow_only(*t, "[domain]", {"kind", "extent", "K", "M", "quadrature_points"});
        if (const toml::node* n = t->get("kind")) {
            auto s = n->value<std::string>();
            if (!s) throw ConfigError("domain.kind must be a string");
            c.domain.kind = domain_kind_from_string(*s);
        }
        c.domain.extent = get_real(*t, "extent", c.domain.extent, "domain");
        c.domain.K = static_cast<int>(get_int(*t, "K", c.domain.K, "domain"));
        c.domain.M = static_cast<int>(get_int(*t, "M", c.domain.M, "domain"));
        c.domain.quadrature_points =
            static_cast<int>(get_int(*t, "quadrature_points", c.domain.quadrature_points, "domain"));
    }
    if (const auto* t = sub(root, "fock")) {
        allow_only(*t, "[fock]", {"n_max", "max_dim"});
        c.n_max = static_cast<int>(get_int(*t, "n_max", c.n_max, "fock"));
        c.max_fock_dim = static_cast<std::size_t>(get_int(*t, "max_dim", static_cast<long long>(c.max_fock_dim), "fock"));
    }
    if (const auto* t = sub(root, "levels")) {
        allow_only(*t, "[levels]", {"n", "energy_window"});
        if (t->get("n") && t->get("energy_window"))
            throw ConfigError("[levels] takes either n or energy_window, not both");
        if (t->get("n")) {
            c.levels.clear();
            for (double v : get_reals(*t, "n", "levels")) {
                if (v != std::floor(v)) throw ConfigError("levels.n entries must be integers");
                c.levels.push_back(static_cast<int>(v));
            }
        }
        if (t->get("energy_window")) {
            const auto w = get_reals(*t, "energy_window", "levels");
            if (w.size() != 2) throw ConfigError("levels.energy_window needs two numbers");
            c.energy_window = std::make_pair(w[0], w[1]);
        }
    }
    if (const auto* t = sub(root, "series")) {
        allow_only(*t, "[series]", {"b_max"});
        c.b_max = static_cast<int>(get_int(*t, "b_max", c.b_max, "series"));
    }
    if (const auto* t = sub(root, "alpha")) {
        allow_only(*t, "[alpha]", {"min", "max", "count", "values", "fit_min", "fit_max"});
        c.alpha_min = get_real(*t, "min", c.alpha_min, "alpha");
        c.alpha_max = get_real(*t, "max", c.alpha_max, "alpha");
        c.alpha_count = static_cast<int>(get_int(*t, "count", c.alpha_count, "alpha"));
        if (t->get("values")) {
            c.alpha_values = get_reals(*t, "values", "alpha");
            if (c.alpha_values.empty()) throw ConfigError("alpha.values is empty");
        }
        c.fit_min = get_real(*t, "fit_min", c.fit_min, "alpha");
        c.fit_max = get_real(*t, "fit_max", c.fit_max, "alpha");
    }
    if (const auto* t = sub(root, "gross")) {
        allow_only(*t, "[gross]", {"cutoffs"});
        if (t->get("cutoffs")) c.cutoffs = get_reals(*t, "cutoffs", "gross");
    }
    if (const auto* t = sub(root, "tolerances")) {
        allow_only(*t, "[tolerances]",
                   {"pekar", "cluster", "odd", "pcg", "fit_margin", "fit_floor", "leakage", "identity"});
        Tolerances& x = c.tol;
        x.pekar = get_real(*t, "pekar", x.pekar, "tolerances");
        x.cluster = get_real(*t, "cluster", x.cluster, "tolerances");
        x.odd = get_real(*t, "odd", x.odd, "tolerances");
        x.pcg = get_real(*t, "pcg", x.pcg, "tolerances");
        x.fit_margin = get_real(*t, "fit_margin", x.fit_margin, "tolerances");
        x.fit_floor = get_real(*t, "fit_floor", x.fit_floor, "tolerances");
        x.leakage = get_real(*t, "leakage", x.leakage, "tolerances");
        x.identity = get_real(*t, "identity", x.identity, "tolerances");
    }
    if (const auto* t = sub(root, "output")) {
        allow_only(*t, "[output]", {"directory"});
        if (const toml::node* n = t->get("directory")) {
            auto s = n->value<std::string>();
            if (!s) throw ConfigError("output.directory must be a string");
            c.output_dir = *s;
        }
    }
    if (const auto* t = sub(root, "run")) {
        allow_only(*t, "[run]", {"seed", "restarts", "memory_budget_mb", "coupling_scale"});
        const long long seed = get_int(*t, "seed", static_cast<long long>(c.seed), "run");
        if (seed < 0) throw ConfigError("run.seed must be nonnegative");
        c.seed = static_cast<std::uint64_t>(seed);
        c.restarts = static_cast<int>(get_int(*t, "restarts", c.restarts, "run"));
        c.memory_budget_mb = get_real(*t, "memory_budget_mb", c.memory_budget_mb, "run");
        c.coupling_scale = get_real(*t, "coupling_scale", c.coupling_scale, "run");
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) throw ConfigError("cannot open config file " + path.string());
    std::string text;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
    std::fclose(f);
    return parse_config(text);
}

std::size_t fock_dimension(int M, int n_max) {
    // C(M + n_max, M)
    double r = 1.0;
    for (int i = 1; i <= M; ++i) r = r * (n_max + i) / i;
    return static_cast<std::size_t>(std::llround(r));
}

double memory_estimate_mb(const RunConfig& cfg) {
    const double D = static_cast<double>(fock_dimension(cfg.domain.M, cfg.n_max));
    return 8.0 * (12.0 * cfg.domain.K * D * D + 20.0 * D * D) / (1024.0 * 1024.0);
}

void validate(const RunConfig& c) {
    validate(c.domain);
    if (c.n_max < 1) throw ConfigError("fock.n_max must be >= 1");
    if (fock_dimension(c.domain.M, c.n_max) > c.max_fock_dim)
        throw ConfigError("Fock dimension exceeds fock.max_dim");
    if (!c.energy_window) {
        if (c.levels.empty()) throw ConfigError("levels.n is empty");
        for (int n : c.levels)
            if (n < 1) throw ConfigError("levels.n entries must be >= 1");
    } else if (!(c.energy_window->first <= c.energy_window->second)) {
        throw ConfigError("levels.energy_window must be ascending");
    }
    if (c.b_max < 0 || c.b_max > 10) throw ConfigError("series.b_max must lie in [0, 10]");
    if (c.alpha_values.empty()) {
        if (c.alpha_count < 1) throw ConfigError("alpha grid is empty");
        if (!(c.alpha_min > 0.0) || !(c.alpha_max >= c.alpha_min) || std::isinf(c.alpha_max))
            throw ConfigError("alpha.min/max must satisfy 0 < min <= max < inf");
    } else {
        for (std::size_t i = 0; i < c.alpha_values.size(); ++i) {
            if (!(c.alpha_values[i] > 0.0)) throw ConfigError("alpha values must be positive");
            if (i > 0 && !(c.alpha_values[i] > c.alpha_values[i - 1]))
                throw ConfigError("alpha values must be strictly ascending");
        }
    }
    if (!(c.fit_min > 0.0) || !(c.fit_max > c.fit_min)) throw ConfigError("alpha fit window is invalid");
    if (c.cutoffs.empty()) throw ConfigError("gross.cutoffs is empty");
    for (double L : c.cutoffs)
        if (!(L >= 0.0)) throw ConfigError("cutoffs must be nonnegative");
    const Tolerances& t = c.tol;
    for (double v : {t.pekar, t.cluster, t.odd, t.pcg, t.fit_margin, t.fit_floor, t.leakage, t.identity})
        if (!(v > 0.0) || std::isinf(v)) throw ConfigError("tolerances must be positive and finite");
    if (c.output_dir.empty()) throw ConfigError("output.directory is empty");
    if (c.restarts < 0) throw ConfigError("run.restarts must be >= 0");
    if (!(c.coupling_scale >= 0.0)) throw ConfigError("run.coupling_scale must be >= 0");
    if (!(c.memory_budget_mb > 0.0)) throw ConfigError("run.memory_budget_mb must be positive");
    if (memory_estimate_mb(c) > c.memory_budget_mb) {
        char msg[200];
        std::snprintf(msg, sizeof msg, "estimated working set %.0f MiB exceeds run.memory_budget_mb = %.0f",
                      memory_estimate_mb(c), c.memory_budget_mb);
        throw ConfigError(msg);
    }
}

std::vector<double> alpha_grid(const RunConfig& c) {
    if (!c.alpha_values.empty()) return c.alpha_values;
    std::vector<double> a;
    for (int i = 0; i < c.alpha_count; ++i)
        a.push_back(c.alpha_count == 1 ? c.alpha_min
                                       : c.alpha_min * std::pow(c.alpha_max / c.alpha_min,
                                                                static_cast<double>(i) / (c.alpha_count - 1)));
    return a;
}

namespace {

nlohmann::ordered_json real_or_inf(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

}  // namespace

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["domain"] = {{"kind", to_string(c.domain.kind)},
                   {"extent", c.domain.extent},
                   {"K", c.domain.K},
                   {"M", c.domain.M},
                   {"quadrature_points", c.domain.quadrature_points}};
    j["fock"] = {{"n_max", c.n_max}, {"max_dim", c.max_fock_dim}};
    if (c.energy_window)
        j["levels"] = {{"energy_window", {c.energy_window->first, c.energy_window->second}}};
    else
        j["levels"] = {{"n", c.levels}};
    j["series"] = {{"b_max", c.b_max}};
    j["alpha"] = {{"grid", alpha_grid(c)}, {"fit_min", c.fit_min}, {"fit_max", c.fit_max}};
    nlohmann::ordered_json cut = nlohmann::ordered_json::array();
    for (double L : c.cutoffs) cut.push_back(real_or_inf(L));
    j["gross"] = {{"cutoffs", cut}};
    j["tolerances"] = {{"pekar", c.tol.pekar},           {"cluster", c.tol.cluster},
                       {"odd", c.tol.odd},               {"pcg", c.tol.pcg},
                       {"fit_margin", c.tol.fit_margin}, {"fit_floor", c.tol.fit_floor},
                       {"leakage", c.tol.leakage},       {"identity", c.tol.identity}};
    j["output"] = {{"directory", c.output_dir}};
    j["run"] = {{"seed", c.seed},
                {"restarts", c.restarts},
                {"memory_budget_mb", c.memory_budget_mb},
                {"coupling_scale", c.coupling_scale}};
    return j;
}

std::string config_hash(const RunConfig& c) {
    // the output location does not change any number, so it is left out
    auto j = to_json(c);
    j.erase("output");
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::filesystem::path output_directory(const RunConfig& c) {
    std::filesystem::path p(c.output_dir);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv(output_root_env); root && *root) return std::filesystem::path(root) / p;
    return p;
}

}  // namespace polaron
