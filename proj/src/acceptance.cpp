#include "polaron/acceptance.hpp"

#include "polaron/errors.hpp"
#include "polaron/gross.hpp"
#include "polaron/pipeline.hpp"

#include <boost/math/tools/roots.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>

namespace polaron {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

json num(double v) {
    if (std::isfinite(v)) return v;
    return format_real(v);
}

json fit_json(const OrderFit& o) {
    json j;
    j["level"] = o.level;
    j["b"] = o.b;
    j["expected_slope"] = o.expected;
    j["margin"] = o.margin;
    j["below_floor"] = o.fit.below_floor;
    j["slope"] = num(o.fit.slope);
    j["r2"] = num(o.fit.r2);
    j["points"] = o.fit.x.size();
    j["stability"] = o.stability;
    j["pass"] = o.pass;
    return j;
}

std::string slope_text(const OrderFit& o) {
    return o.fit.below_floor ? std::string("below floor") : fmt("%.3f", o.fit.slope);
}

// Runtime budgets that are part of the criteria themselves, seconds.
constexpr double budget_dual_path = 60.0;
constexpr double budget_odd = 120.0;
constexpr double budget_series = 600.0;

constexpr int sweep_levels = 4;
constexpr int coefficient_order = 4;

// The engineered crossing lives near L = 13 for the interval with K = 10, M = 4.
constexpr double crossing_lo = 12.0;
constexpr double crossing_hi = 14.5;
constexpr int crossing_n_max = 8;
constexpr int crossing_alphas = 6;
constexpr double crossing_coupling_floor = 1e-8;  // below this (M1)_12 counts as zero

struct Shared {
    const RunConfig& cfg;
    const AcceptanceOptions& opts;
    AcceptanceThresholds th;
    std::optional<Prepared> prepared;
    std::optional<SpectralSweep> sweep;
    std::map<int, SeriesResult> series;

    Prepared& base() {
        if (!prepared) prepared = prepare(cfg);
        return *prepared;
    }

    SeriesContext context(int n) { return make_series_context(base().model, n, cfg.tol.cluster); }

    const SeriesResult& level(int n) {
        auto it = series.find(n);
        if (it != series.end()) return it->second;
        const SeriesContext ctx = context(n);
        SeriesResult r = ctx.d() == 1 ? coefficients_nondegenerate(ctx, coefficient_order, cfg.tol.odd)
                                      : coefficients_degenerate(ctx, n - ctx.group.first, coefficient_order);
        return series.emplace(n, std::move(r)).first->second;
    }

    const SpectralSweep& spectral() {
        if (sweep) return *sweep;
        if (opts.sweep && opts.sweep->levels >= sweep_levels) {
            sweep = opts.sweep;
        } else {
            sweep = exact_levels(*base().model, alpha_grid(cfg), sweep_levels, oracle_options(cfg));
        }
        return *sweep;
    }

    OrderFit order_fit(int n, const std::vector<double>& E, int b) {
        return coefficient_order_fit(spectral(), n, E, b, cfg.fit_min, cfg.fit_max, cfg.tol.fit_margin,
                                     cfg.tol.fit_floor);
    }
};

// 1: H0 matrix spectrum against the ladder formula.
void dual_path(Shared& s, CriterionResult& r) {
    DomainSpec d = s.cfg.domain;
    d.M = 4;
    d.K = std::max(d.K, d.M);
    const Basis basis = build_basis(d);
    PekarOptions po;
    po.tol = s.cfg.tol.pekar;
    const PekarSolution sol = solve_pekar(electron_model(basis, s.cfg.coupling_scale), po);
    const HessianModel hm = hessian_matrix(sol);
    const auto lad = ladder_spectrum(hm, 8);
    std::vector<double> worst;
    json rows = json::array();
    for (int n_max : {4, 6, 8, 10, 12}) {
        const auto fm = make_fluctuation_model(sol, n_max, s.cfg.max_fock_dim);
        double w = 0.0;
        json errs = json::array();
        for (int i = 0; i < 8; ++i) {
            const double e = std::abs(fm->spectrum.values[i] - lad[i].energy) / std::abs(lad[i].energy);
            errs.push_back(e);
            w = std::max(w, e);
        }
        worst.push_back(w);
        rows.push_back({{"n_max", n_max}, {"max_relative_error", w}, {"relative_errors", errs}});
    }
    bool monotone = true;
    for (std::size_t i = 1; i < worst.size(); ++i) monotone = monotone && worst[i] <= worst[i - 1];
    r.details["truncations"] = rows;
    r.details["monotone"] = monotone;
    r.pass = worst.back() <= s.th.ladder_relative && monotone;
    r.summary = fmt("max rel err %.2e at N_max=12 (limit %.0e), %s over N_max 4..12", worst.back(),
                    s.th.ladder_relative, monotone ? "monotone" : "NOT monotone");
}

// 2: Bogoliubov identity for the Gross-transformed operators.
void identity(Shared& s, CriterionResult& r) {
    const auto& lam = s.base().sol.model.lambda;
    const int M = s.base().sol.model.M();
    const int h = std::max(1, M / 2);
    const double mid = h < M ? std::pow(lam[h - 1] * lam[h], 0.25) : std::sqrt(lam[M - 1]);
    const double E0 = s.level(1).E[0];
    double dev = 0.0, pk1p = 0.0;
    json rows = json::array();
    for (double cut : {0.0, mid, infinite_cutoff}) {
        const GrossContext g = build_K(s.base().model, cut, {E0});
        const IdentityReport rep = verify_bogoliubov_identity(g);
        dev = std::max(dev, rep.deviation);
        pk1p = std::max(pk1p, rep.pk1p);
        json j;
        j["cutoff"] = num(cut);
        j["modes_outside"] = g.outside.size();
        j["deviation"] = rep.deviation;
        j["pk1p"] = rep.pk1p;
        j["hermiticity_K1"] = hermiticity_defect(g, 1, s.cfg.seed);
        j["hermiticity_K2"] = hermiticity_defect(g, 2, s.cfg.seed + 1);
        j["uv_identity"] = uv_identity_deviation(s.base().basis, cut);
        j["kinetic_assembly"] = kinetic_assembly_deviation(s.base().basis, cut);
        j["textbook_K1_gap"] = textbook_K1_deviation(g, s.base().basis);
        rows.push_back(j);
    }
    r.details["cutoffs"] = rows;
    r.pass = dev <= s.th.identity && pk1p <= s.th.pk1p;
    r.summary = fmt("identity deviation %.2e (limit %.0e), |PK1P| %.2e (limit %.0e), cutoffs 0, %.3g, inf", dev,
                    s.th.identity, pk1p, s.th.pk1p, mid);
}

// 3: odd coefficients of the ground level.
void odd_vanishing(Shared& s, CriterionResult& r) {
    const SeriesResult& sr = s.level(1);
    if (sr.d != 1) throw NumericalError("ground level is degenerate");
    const double scale = s.th.odd * std::max(1.0, std::abs(sr.E[2]));
    double worst = 0.0;
    json raw = json::array();
    for (double v : sr.odd_raw) {
        raw.push_back(v);
        worst = std::max(worst, std::abs(v));
    }
    r.details["odd_raw"] = raw;
    r.details["E"] = sr.E;
    r.details["limit"] = scale;
    r.pass = sr.odd_raw.size() >= 2 && worst <= scale;
    r.summary = fmt("max |E1|,|E3| = %.2e (limit %.2e)", worst, scale);
}

// 4: closed forms for E2 and E4 against the recursion.
void explicit_agreement(Shared& s, CriterionResult& r) {
    const SeriesResult& sr = s.level(1);
    const SeriesContext ctx = s.context(1);
    const double e2 = explicit_E2(ctx);
    const double e4 = explicit_E4(ctx, sr.E);
    const double d2 = std::abs(e2 - sr.E[2]) / std::abs(sr.E[2]);
    const double d4 = std::abs(e4 - sr.E[4]) / std::abs(sr.E[4]);
    r.details["E2"] = {{"explicit", e2}, {"recursion", sr.E[2]}, {"relative", d2}};
    r.details["E4"] = {{"explicit", e4}, {"recursion", sr.E[4]}, {"relative", d4}};
    r.pass = d2 <= s.th.explicit_relative && d4 <= s.th.explicit_relative;
    r.summary = fmt("E2 rel %.2e, E4 rel %.2e (limit %.0e)", d2, d4, s.th.explicit_relative);
}

// 5: remainder slopes for the ground level.
void series_order(Shared& s, CriterionResult& r, const Clock::time_point t0) {
    const std::vector<double>& E = s.level(1).E;
    json fits = json::array();
    bool ok = true;
    std::string parts;
    for (int b : {0, 2, 4}) {
        const OrderFit o = s.order_fit(1, E, b);
        json j = fit_json(o);
        if (o.fit.below_floor) {
            // nothing above the configured floor; a fit without it shows the trend
            const LogLogFit diag = fit_loglog(o.alphas, o.values, s.cfg.fit_min, s.cfg.fit_max, 1e-30);
            j["diagnostic_slope"] = num(diag.slope);
        }
        fits.push_back(j);
        ok = ok && o.pass;
        parts += fmt("%sb=%d %s", parts.empty() ? "" : ", ", b, slope_text(o).c_str());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    r.details["fits"] = fits;
    r.details["alphas"] = s.spectral().alphas;
    r.pass = ok && secs <= budget_series;
    r.summary = fmt("slopes %s over [%g, %g]", parts.c_str(), s.cfg.fit_min, s.cfg.fit_max);
}

// 6: b = 0 fits for the first four levels.
void localization(Shared& s, CriterionResult& r) {
    json fits = json::array();
    bool ok = true;
    std::string parts;
    for (int n = 1; n <= sweep_levels; ++n) {
        const OrderFit o = s.order_fit(n, s.level(n).E, 0);
        fits.push_back(fit_json(o));
        ok = ok && o.pass;
        parts += fmt("%sn=%d %s", parts.empty() ? "" : ", ", n, slope_text(o).c_str());
    }
    r.details["fits"] = fits;
    r.pass = ok;
    r.summary = fmt("b=0 slopes %s (limit %.2f)", parts.c_str(), -1.0 + s.cfg.tol.fit_margin);
}

// 7: residual of the approximate eigenstate at Lambda = inf.
void residual_order(Shared& s, CriterionResult& r) {
    const SeriesContext ctx = s.context(1);
    std::vector<double> alphas;
    for (double a : alpha_grid(s.cfg))
        if (a >= s.cfg.fit_min && a <= s.cfg.fit_max) alphas.push_back(a);
    json fits = json::array();
    bool ok = true;
    std::string parts;
    for (int b : {0, 2}) {
        const SeriesResult sr = coefficients_nondegenerate(ctx, b, s.cfg.tol.odd);
        const GrossContext g = build_K(s.base().model, infinite_cutoff, sr.E);
        std::vector<double> res, norms;
        for (double a : alphas) {
            const ApproximateState st = approximate_eigenstate(g, ctx, sr, a);
            res.push_back(residual_norm(g, st, a));
            norms.push_back(st.norm);
        }
        const OrderFit o =
            residual_order_fit(alphas, res, b, s.cfg.fit_min, s.cfg.fit_max, s.cfg.tol.fit_margin, s.cfg.tol.fit_floor);
        json j = fit_json(o);
        j["alphas"] = alphas;
        j["residuals"] = res;
        j["norms"] = norms;
        fits.push_back(j);
        ok = ok && o.pass;
        parts += fmt("%sb=%d %s", parts.empty() ? "" : ", ", b, slope_text(o).c_str());
    }
    r.details["fits"] = fits;
    r.pass = ok;
    r.summary = fmt("residual slopes %s (targets -3, -5)", parts.c_str());
}

// 8: the d = 2 cluster of the engineered crossing.
void degenerate(Shared& s, CriterionResult& r) {
    DomainSpec d = s.cfg.domain;
    d.kind = DomainKind::interval;
    d.K = std::max(d.K, 10);
    d.M = 4;
    const DegenerateSetup setup = engineer_crossing(d, crossing_n_max, crossing_lo, crossing_hi);
    r.details["found"] = setup.found;
    if (!setup.found) {
        r.pass = false;
        r.summary = fmt("no opposite-parity crossing in L in [%g, %g]", crossing_lo, crossing_hi);
        return;
    }
    RunConfig c = s.cfg;
    c.domain = d;
    c.domain.extent = setup.extent;
    c.n_max = crossing_n_max;
    c.coupling_scale = 1.0;
    const Prepared p = prepare(c);
    const SeriesContext ctx = make_series_context(p.model, setup.level, c.tol.cluster);
    r.details["extent"] = setup.extent;
    r.details["level"] = setup.level;
    r.details["gap"] = setup.gap;
    r.details["d"] = ctx.d();
    if (ctx.d() != 2) {
        r.pass = false;
        r.summary = fmt("cluster at level %d has d=%d", setup.level, ctx.d());
        return;
    }
    const Eigen::MatrixXd M1 = first_order_coupling(ctx);
    const SeriesResult b1 = coefficients_degenerate(ctx, 1, 2);
    const SeriesResult b2 = coefficients_degenerate(ctx, 2, 2);
    const double routes = (M1 - b1.M[0]).cwiseAbs().maxCoeff();
    const double diag = std::max({std::abs(M1(0, 0)), std::abs(M1(1, 1)), std::abs(b1.M[0](0, 0)),
                                  std::abs(b1.M[0](1, 1))});
    const double m12 = std::abs(M1(0, 1));
    r.details["M1"] = {{M1(0, 0), M1(0, 1)}, {M1(1, 0), M1(1, 1)}};
    r.details["route_gap"] = routes;
    r.details["E_s1"] = b1.E;
    r.details["E_s2"] = b2.E;
    const bool diag_ok = diag <= s.th.diagonal_M1 && routes <= s.th.diagonal_M1;

    if (m12 <= crossing_coupling_floor) {
        // preserved degeneracy: both branches carry the same first-order coefficient
        const double same = std::abs(b1.E[1] - b2.E[1]);
        r.details["branch"] = "preserved";
        r.pass = diag_ok && same <= s.th.first_order_branch;
        r.summary = fmt("preserved-degeneracy branch: |(M1)12|=%.1e, |E1(1)-E1(2)|=%.1e, diag %.1e", m12, same, diag);
        return;
    }
    r.details["branch"] = "split";
    const double e1a = std::abs(b1.E[1] + m12), e1b = std::abs(b2.E[1] - m12);

    const std::vector<double> alphas = log_grid(c.fit_min, c.fit_max, crossing_alphas);
    const SpectralSweep sw = exact_levels(*p.model, alphas, setup.level + 1, oracle_options(c));
    std::vector<double> split, x, y;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double v = sw.shift(i, setup.level) - sw.shift(i, setup.level - 1);  // alpha^2 (E~_{n+1} - E~_n)
        split.push_back(v);
        x.push_back(1.0 / alphas[i]);
        y.push_back(alphas[i] * v);
    }
    // alpha * split = A + B / alpha + ...; A is the alpha^{-3} amplitude
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double A = my - (sxy / sxx) * mx;
    const double rel = std::abs(A - 2.0 * m12) / (2.0 * m12);
    const LogLogFit lf = fit_loglog(alphas, split, c.fit_min, c.fit_max, c.tol.fit_floor);
    const bool slope_ok = !lf.below_floor && std::abs(lf.slope + 1.0) <= c.tol.fit_margin;
    r.details["alphas"] = alphas;
    r.details["scaled_split"] = split;
    r.details["amplitude"] = A;
    r.details["amplitude_relative"] = rel;
    r.details["split_slope"] = num(lf.slope);
    r.pass = diag_ok && e1a <= s.th.first_order_branch && e1b <= s.th.first_order_branch &&
             rel <= s.th.splitting_relative && slope_ok;
    r.summary = fmt("L=%.6f level %d-%d: |(M1)12|=%.4f, diag %.1e, E1 err %.1e/%.1e, split amp %.4f vs %.4f "
                    "(rel %.1e), split slope %.3f",
                    setup.extent, setup.level, setup.level + 1, m12, diag, e1a, e1b, A, 2.0 * m12, rel, lf.slope);
}

// 9: Hessian properties.
void hessian_suite(Shared& s, CriterionResult& r) {
    const HessianModel& hm = s.base().hessian;
    const double tmin = hm.tau.minCoeff(), tmax = hm.tau.maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm.G, Eigen::EigenvaluesOnly);
    const double gmax = es.eigenvalues().maxCoeff();

    PekarOptions po;
    po.tol = s.cfg.tol.pekar;
    const PekarSolution off = solve_pekar(electron_model(s.base().basis, 0.0), po);
    const BogoliubovKernel bk = bogoliubov_kernel(hessian_matrix(off));
    r.details["tau"] = std::vector<double>(hm.tau.data(), hm.tau.data() + hm.tau.size());
    r.details["G_max_eigenvalue"] = gmax;
    r.details["kernel_hs_norm_off"] = bk.hs_norm;
    r.details["e_pek_off"] = off.e_pek;
    r.details["lambda_1"] = s.base().basis.lambda[0];
    r.pass = tmin > 0.0 && tmax <= 1.0 + s.th.tau_ceiling && gmax <= s.th.g_ceiling && bk.hs_norm <= s.th.kernel_off;
    r.summary = fmt("tau in [%.4f, %.10f], max eig G %.1e, |B|_HS off %.1e", tmin, tmax, gmax, bk.hs_norm);
}

// 10: perturbed coefficients must be caught by the series-order fit.
void fault_injection(Shared& s, CriterionResult& r) {
    const std::vector<double>& E = s.level(1).E;
    json rows = json::array();
    int cases = 0, caught = 0;
    for (int l = 0; l <= coefficient_order; ++l)
        for (int b : {0, 2, 4}) {
            if (b < l) continue;
            std::vector<double> bad = E;
            bad[l] += s.th.fault;
            const OrderFit o = s.order_fit(1, bad, b);
            ++cases;
            caught += o.pass ? 0 : 1;
            rows.push_back({{"l", l}, {"b", b}, {"slope", num(o.fit.slope)}, {"caught", !o.pass}});
        }
    r.details["cases"] = rows;
    r.pass = caught == cases;
    r.summary = fmt("%d of %d perturbed fits rejected (shift %.0e)", caught, cases, s.th.fault);
}

const char* criterion_name(int id) {
    static const char* names[] = {"bogoliubov-dual-path", "bogoliubov-identity", "odd-vanishing",
                                  "explicit-coefficients", "series-order",       "two-term-localization",
                                  "residual-order",        "degenerate-splitting", "hessian-properties",
                                  "fault-injection"};
    return names[id - 1];
}

}  // namespace

std::vector<double> number_parity(const FluctuationModel& model, int count) {
    const Eigen::VectorXd N = number_diagonal(*model.fock);
    Eigen::VectorXd sign(N.size());
    for (int i = 0; i < N.size(); ++i) sign[i] = (static_cast<long>(std::lround(N[i])) % 2) ? -1.0 : 1.0;
    std::vector<double> out;
    for (int k = 0; k < count && k < model.spectrum.vectors.cols(); ++k)
        out.push_back(model.spectrum.vectors.col(k).cwiseAbs2().dot(sign));
    return out;
}

DegenerateSetup engineer_crossing(const DomainSpec& base, int n_max, double lo, double hi) {
    constexpr int window = 8;
    struct Probe {
        double gap;
        int even, odd;  // spectrum positions
    };
    auto probe = [&](double L) {
        DomainSpec d = base;
        d.extent = L;
        const PekarSolution sol = solve_pekar(electron_model(build_basis(d)));
        const auto fm = make_fluctuation_model(sol, n_max);
        const auto par = number_parity(*fm, window);
        int ne = 0, no = 0;
        Probe p{0.0, -1, -1};
        for (int k = 0; k < static_cast<int>(par.size()); ++k) {
            if (par[k] > 0.0 && ++ne == 2) p.even = k;
            if (par[k] < 0.0 && ++no == 2) p.odd = k;
        }
        if (p.even < 0 || p.odd < 0) throw NumericalError("crossing search: parity sectors too sparse");
        p.gap = fm->spectrum.values[p.even] - fm->spectrum.values[p.odd];
        return p;
    };
    DegenerateSetup out;
    const double flo = probe(lo).gap, fhi = probe(hi).gap;
    if (!(flo * fhi < 0.0)) return out;
    boost::uintmax_t iters = 100;
    const auto root = boost::math::tools::toms748_solve([&](double L) { return probe(L).gap; }, lo, hi, flo, fhi,
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
    // keep the endpoint with the smaller gap
    const Probe a = probe(root.first), b = probe(root.second);
    const bool first = std::abs(a.gap) <= std::abs(b.gap);
    const Probe& p = first ? a : b;
    out.found = true;
    out.extent = first ? root.first : root.second;
    out.level = std::min(p.even, p.odd) + 1;
    out.gap = std::abs(p.gap);
    return out;
}

std::vector<CriterionResult> run_acceptance(const RunConfig& cfg, const AcceptanceOptions& opts) {
    Shared s{cfg, opts, {}, std::nullopt, std::nullopt, {}};
    std::vector<CriterionResult> out;
    for (int id = 1; id <= criterion_count; ++id) {
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
        CriterionResult r;
        r.id = id;
        r.name = criterion_name(id);
        const auto t0 = Clock::now();
        try {
            switch (id) {
                case 1: dual_path(s, r); break;
                case 2: identity(s, r); break;
                case 3: odd_vanishing(s, r); break;
                case 4: explicit_agreement(s, r); break;
                case 5: series_order(s, r, t0); break;
                case 6: localization(s, r); break;
                case 7: residual_order(s, r); break;
                case 8: degenerate(s, r); break;
                case 9: hessian_suite(s, r); break;
                case 10: fault_injection(s, r); break;
            }
        } catch (const std::exception& e) {
            r.pass = false;
            r.summary = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (id == 1 && r.seconds > budget_dual_path) {
            r.pass = false;
            r.summary += fmt("; over the %.0f s budget", budget_dual_path);
        }
        if (id == 3 && r.seconds > budget_odd) {
            r.pass = false;
            r.summary += fmt("; over the %.0f s budget", budget_odd);
        }
        r.details["seconds"] = r.seconds;
        if (opts.on_result) opts.on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_line(const CriterionResult& r) {
    return fmt("%s %2d %-22s %s [%.1f s]", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.summary.c_str(),
               r.seconds);
}

nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results) {
    json arr = json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"summary", r.summary}, {"details", r.details}});
    }
    return {{"all_pass", all}, {"criteria", arr}};
}

}  // namespace polaron
