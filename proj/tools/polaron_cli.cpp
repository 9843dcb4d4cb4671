// Batch front end. Every subcommand reads a TOML config (defaults when none
// is given), applies flag overrides, and writes stamped CSV/JSON into the
// output directory.
#include "polaron/acceptance.hpp"
#include "polaron/config.hpp"
#include "polaron/errors.hpp"
#include "polaron/fit.hpp"
#include "polaron/gross.hpp"
#include "polaron/pipeline.hpp"
#include "polaron/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>

using namespace polaron;
using json = nlohmann::ordered_json;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_acceptance = 4;

struct Overrides {
    std::string config;
    std::optional<std::string> domain;
    std::optional<double> extent;
    std::optional<int> K, M, n_max, b_max, alpha_count, seed;
    std::optional<double> alpha_min, alpha_max, coupling_scale;
    std::vector<int> levels;
    std::optional<std::string> output;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config, "TOML run configuration");
        app->add_option("--domain", domain, "interval | ball");
        app->add_option("--extent", extent, "interval length or ball radius");
        app->add_option("--K", K, "electron modes");
        app->add_option("--M", M, "phonon modes");
        app->add_option("--n-max", n_max, "Fock truncation");
        app->add_option("--levels", levels, "1-based levels");
        app->add_option("--b-max", b_max, "highest series order");
        app->add_option("--alpha-min", alpha_min);
        app->add_option("--alpha-max", alpha_max);
        app->add_option("--alpha-count", alpha_count);
        app->add_option("--seed", seed);
        app->add_option("--coupling-scale", coupling_scale, "0 switches the interaction off");
        app->add_option("-o,--output", output, "output directory");
    }

    RunConfig resolve() const {
        RunConfig c = config.empty() ? RunConfig{} : load_config(config);
        if (domain) c.domain.kind = domain_kind_from_string(*domain);
        if (extent) c.domain.extent = *extent;
        if (K) c.domain.K = *K;
        if (M) c.domain.M = *M;
        if (n_max) c.n_max = *n_max;
        if (!levels.empty()) {
            c.levels = levels;
            c.energy_window.reset();
        }
        if (b_max) c.b_max = *b_max;
        if (alpha_min || alpha_max || alpha_count) c.alpha_values.clear();
        if (alpha_min) c.alpha_min = *alpha_min;
        if (alpha_max) c.alpha_max = *alpha_max;
        if (alpha_count) c.alpha_count = *alpha_count;
        if (seed) {
            if (*seed < 0) throw ConfigError("--seed must be nonnegative");
            c.seed = static_cast<std::uint64_t>(*seed);
        }
        if (coupling_scale) c.coupling_scale = *coupling_scale;
        if (output) c.output_dir = *output;
        validate(c);
        return c;
    }
};

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json to_rows(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) a.push_back(to_vec(m.row(i).transpose()));
    return a;
}

json real(double v) { return std::isfinite(v) ? json(v) : json(format_real(v)); }

void note(const std::filesystem::path& p) { std::printf("wrote %s\n", p.string().c_str()); }

int cmd_solve_pekar(const RunConfig& cfg) {
    const Prepared p = prepare(cfg, false);
    PekarOptions po;
    po.tol = cfg.tol.pekar;
    const AssumptionReport rep = verify_assumptions(p.sol, cfg.restarts, cfg.seed, po);
    json body;
    body["e_pek"] = p.sol.e_pek;
    body["mu_pek"] = p.sol.mu_pek;
    body["lambda_1"] = p.basis.lambda[0];
    body["gap"] = p.sol.gap;
    body["residual"] = p.sol.residual;
    body["iterations"] = p.sol.iterations;
    body["coefficients"] = to_vec(p.sol.c);
    body["phi_p"] = to_vec(p.sol.phi_p);
    body["h0_values"] = to_vec(p.sol.h0_values);
    body["basis_orthonormality_error"] = p.basis.orthonormality_error;
    body["assumptions"] = {{"restarts", rep.restarts},
                           {"max_restart_deviation", rep.max_restart_deviation},
                           {"unique", rep.unique},
                           {"tau_hat", rep.tau_hat},
                           {"coercivity_samples", rep.coercivity_samples},
                           {"gap", rep.gap}};
    const auto path = output_directory(cfg) / "pekar.json";
    write_json(path, {config_hash(cfg), "pekar"}, body);
    note(path);
    std::printf("e_pek = %.15g  gap = %.6g  iterations = %d  unique = %s\n", p.sol.e_pek, p.sol.gap,
                p.sol.iterations, rep.unique ? "yes" : "no");
    return 0;
}

int cmd_hessian(const RunConfig& cfg) {
    const Prepared p = prepare(cfg, false);
    const HessianModel& hm = p.hessian;
    const BogoliubovKernel bk = bogoliubov_kernel(hm);
    const std::string hash = config_hash(cfg);
    const auto dir = output_directory(cfg);

    CsvTable tau({"k", "tau", "frequency", "squeeze"});
    for (int k = 0; k < hm.tau.size(); ++k)
        tau.add({std::to_string(k + 1), format_real(hm.tau[k]), format_real(std::sqrt(hm.tau[k])),
                 format_real(bk.squeeze[k])});
    tau.write(dir / "tau.csv", {hash, "tau"});
    note(dir / "tau.csv");

    const auto lad = ladder_spectrum(hm, 16, true);
    CsvTable ladder({"index", "energy", "degeneracy", "occupation"});
    for (const auto& l : lad) {
        std::string occ;
        for (std::size_t k = 0; k < l.occupation.size(); ++k) occ += (k ? " " : "") + std::to_string(l.occupation[k]);
        ladder.add({std::to_string(l.index), format_real(l.energy), std::to_string(l.degeneracy), occ});
    }
    ladder.write(dir / "ladder.csv", {hash, "ladder"});
    note(dir / "ladder.csv");

    json body;
    body["G"] = to_rows(hm.G);
    body["h"] = to_rows(hm.h);
    body["tau"] = to_vec(hm.tau);
    body["ground_energy"] = ground_energy(hm);
    body["kernel_hs_norm"] = bk.hs_norm;
    body["domination_constant"] = bk.domination_constant;
    write_json(dir / "hessian.json", {hash, "hessian"}, body);
    note(dir / "hessian.json");
    return 0;
}

int cmd_bogoliubov_spectrum(const RunConfig& cfg) {
    const Prepared p = prepare(cfg);
    const FluctuationModel& fm = *p.model;
    const int count = std::min(16, fm.fock->dim());
    const auto lad = ladder_spectrum(p.hessian, count);
    CsvTable t({"index", "fock", "ladder", "relative_error", "ladder_degeneracy"});
    for (int i = 0; i < count; ++i)
        t.add({std::to_string(i + 1), format_real(fm.spectrum.values[i]), format_real(lad[i].energy),
               format_real(std::abs(fm.spectrum.values[i] - lad[i].energy) / std::abs(lad[i].energy)),
               std::to_string(lad[i].degeneracy)});
    const auto dir = output_directory(cfg);
    const std::string hash = config_hash(cfg);
    t.write(dir / "bogoliubov_spectrum.csv", {hash, "bogoliubov_spectrum"});
    note(dir / "bogoliubov_spectrum.csv");

    const BogoliubovKernel bk = bogoliubov_kernel(p.hessian);
    const Eigen::VectorXd N = number_diagonal(*fm.fock);
    const double n_ground = fm.spectrum.vectors.col(0).cwiseAbs2().dot(N);
    const BogoliubovUnitary U = bogoliubov_unitary(*fm.fock, p.hessian, cfg.tol.leakage);
    json body;
    body["fock_dim"] = fm.fock->dim();
    body["ground_number_expectation"] = n_ground;
    body["kernel_hs_norm_squared"] = bk.hs_norm * bk.hs_norm;
    body["unitary_leakage"] = U.leakage;
    write_json(dir / "bogoliubov.json", {hash, "bogoliubov"}, body);
    note(dir / "bogoliubov.json");
    return 0;
}

int cmd_series(const RunConfig& cfg) {
    const Prepared p = prepare(cfg);
    const auto levels = resolve_levels(cfg, p.hessian, p.model->fock->dim());
    CsvTable t({"level", "s", "d", "l", "E"});
    json per = json::array();
    for (int n : levels) {
        const SeriesContext ctx = make_series_context(p.model, n, cfg.tol.cluster);
        const auto results = level_series(p.model, n, cfg.b_max, cfg.tol);
        for (const auto& r : results) {
            // within a cluster, branch s continues level first + s
            if (ctx.d() > 1 && ctx.group.first + r.s != n) continue;
            for (std::size_t l = 0; l < r.E.size(); ++l)
                t.add({std::to_string(n), std::to_string(r.s), std::to_string(r.d), std::to_string(l),
                       format_real(r.E[l])});
            json j;
            j["level"] = n;
            j["s"] = r.s;
            j["d"] = r.d;
            j["E"] = r.E;
            j["odd_raw"] = r.odd_raw;
            j["shared_branch"] = r.shared_branch;
            json ms = json::array();
            for (const auto& m : r.M) ms.push_back(to_rows(m));
            j["M"] = ms;
            const GrowthReport g = growth_check(r.E);
            j["growth"] = {{"c_hat", g.c_hat}, {"per_order", g.per_order}};
            per.push_back(j);
        }
    }
    const auto dir = output_directory(cfg);
    const std::string hash = config_hash(cfg);
    t.write(dir / "series.csv", {hash, "series"});
    note(dir / "series.csv");
    write_json(dir / "series.json", {hash, "series"}, {{"levels", per}});
    note(dir / "series.json");
    return 0;
}

int cmd_gross_check(const RunConfig& cfg) {
    const Prepared p = prepare(cfg);
    const SeriesContext ctx = make_series_context(p.model, 1, cfg.tol.cluster);
    const int b = std::min(cfg.b_max, 4);
    const SeriesResult sr = coefficients_nondegenerate(ctx, b, cfg.tol.odd);
    CsvTable t({"cutoff", "outside_modes", "identity_deviation", "pk1p", "hermiticity_K1", "hermiticity_K2",
                "uv_identity", "kinetic_assembly", "textbook_K1_gap", "g_norm", "k_based_E_gap"});
    for (double cut : cfg.cutoffs) {
        const GrossContext g = build_K(p.model, cut, sr.E);
        const IdentityReport rep = verify_bogoliubov_identity(g);
        const auto kE = k_based_coefficients(g, ctx, b);
        double gap = 0.0;
        for (std::size_t l = 0; l < kE.size() && l < sr.E.size(); ++l) gap = std::max(gap, std::abs(kE[l] - sr.E[l]));
        t.add({format_real(cut), std::to_string(g.outside.size()), format_real(rep.deviation), format_real(rep.pk1p),
               format_real(hermiticity_defect(g, 1, cfg.seed)), format_real(hermiticity_defect(g, 2, cfg.seed + 1)),
               format_real(uv_identity_deviation(p.basis, cut)), format_real(kinetic_assembly_deviation(p.basis, cut)),
               format_real(textbook_K1_deviation(g, p.basis)), format_real(g_norm(g)), format_real(gap)});
    }
    const auto path = output_directory(cfg) / "gross.csv";
    t.write(path, {config_hash(cfg), "gross"});
    note(path);
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    const Prepared p = prepare(cfg);
    const auto levels = resolve_levels(cfg, p.hessian, p.model->fock->dim());
    const int top = std::max(levels.back(), 4);
    const SpectralSweep sw = exact_levels(*p.model, alpha_grid(cfg), top, oracle_options(cfg));
    const auto dir = output_directory(cfg);
    const std::string hash = config_hash(cfg);
    sweep_table(sw).write(dir / sweep_file, {hash, "sweep"});
    note(dir / sweep_file);

    json fits = json::array();
    for (int n : levels) {
        const SeriesContext ctx = make_series_context(p.model, n, cfg.tol.cluster);
        const SeriesResult r = ctx.d() == 1 ? coefficients_nondegenerate(ctx, cfg.b_max, cfg.tol.odd)
                                            : coefficients_degenerate(ctx, n - ctx.group.first, cfg.b_max);
        for (int b = 0; b <= cfg.b_max; ++b) {
            const OrderFit o =
                coefficient_order_fit(sw, n, r.E, b, cfg.fit_min, cfg.fit_max, cfg.tol.fit_margin, cfg.tol.fit_floor);
            json j;
            j["level"] = n;
            j["b"] = b;
            j["expected_slope"] = o.expected;
            j["below_floor"] = o.fit.below_floor;
            j["slope"] = real(o.fit.slope);
            j["intercept"] = real(o.fit.intercept);
            j["r2"] = real(o.fit.r2);
            j["points"] = o.fit.x.size();
            j["stability"] = o.stability;
            j["pass"] = o.pass;
            j["remainder"] = o.values;
            fits.push_back(j);
            std::printf("level %d b=%d slope %s\n", n, b,
                        o.fit.below_floor ? "below floor" : format_real(o.fit.slope).c_str());
        }
    }
    write_json(dir / "fits.json", {hash, "fits"}, {{"alphas", sw.alphas}, {"fits", fits}});
    note(dir / "fits.json");
    return 0;
}

int cmd_validate(const RunConfig& cfg, const std::vector<int>& only) {
    for (int id : only)
        if (id < 1 || id > criterion_count) throw ConfigError("--only ids must lie in 1.." + std::to_string(criterion_count));
    AcceptanceOptions opts;
    opts.only = only;
    opts.sweep = cached_sweep(cfg);
    if (opts.sweep) std::printf("reusing %s\n", (output_directory(cfg) / sweep_file).string().c_str());
    opts.on_result = [](const CriterionResult& r) {
        std::printf("%s\n", format_line(r).c_str());
        std::fflush(stdout);
    };
    const auto results = run_acceptance(cfg, opts);
    const auto path = output_directory(cfg) / "acceptance.json";
    write_json(path, {config_hash(cfg), "acceptance"}, to_json(results));
    note(path);
    for (const auto& r : results)
        if (!r.pass) return exit_acceptance;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strong-coupling polaron expansion on a bounded domain"};
    app.require_subcommand(1);
    Overrides ov;
    std::vector<int> only;
    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {{"solve-pekar", "Pekar minimizer and assumption checks"},
                        {"hessian", "Hessian, tau spectrum and ladder levels"},
                        {"bogoliubov-spectrum", "truncated H0 spectrum against the ladder"},
                        {"series", "coefficients E_l and M_k per level"},
                        {"gross-check", "Gross transformation identities per cutoff"},
                        {"sweep", "exact levels over the alpha grid and order fits"},
                        {"validate", "acceptance checks"}};
    std::vector<CLI::App*> cmds;
    for (const auto& s : subs) {
        CLI::App* c = app.add_subcommand(s.name, s.help);
        ov.attach(c);
        cmds.push_back(c);
    }
    cmds.back()->add_option("--only", only, "criterion ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        const RunConfig cfg = ov.resolve();
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "solve-pekar") return cmd_solve_pekar(cfg);
        if (name == "hessian") return cmd_hessian(cfg);
        if (name == "bogoliubov-spectrum") return cmd_bogoliubov_spectrum(cfg);
        if (name == "series") return cmd_series(cfg);
        if (name == "gross-check") return cmd_gross_check(cfg);
        if (name == "sweep") return cmd_sweep(cfg);
        return cmd_validate(cfg, only);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return exit_numerical;
    }
}
