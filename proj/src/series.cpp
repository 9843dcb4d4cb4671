#include "polaron/series.hpp"

#include "polaron/errors.hpp"

#include <cmath>
#include <string>

namespace polaron {
namespace {

void require_E(const std::vector<double>& E, int index, const char* what) {
    if (index >= 0 && static_cast<int>(E.size()) <= index)
        throw ConfigError(std::string(what) + " needs E_" + std::to_string(index) + " which is not yet known");
}

// Element-wise Neumaier accumulation of matrix terms.
struct CompensatedSum {
    Eigen::MatrixXd sum, comp;
    void add(const Eigen::MatrixXd& x) {
        if (sum.size() == 0) {
            sum = x;
            comp = Eigen::MatrixXd::Zero(x.rows(), x.cols());
            return;
        }
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double s = sum.data()[i], v = x.data()[i];
            const double t = s + v;
            comp.data()[i] += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
            sum.data()[i] = t;
        }
    }
    Eigen::MatrixXd value() const { return sum + comp; }
};

void check_order(int l) {
    if (l > max_series_order + 2)
        throw ConfigError("series order " + std::to_string(l) + " exceeds the guard of " +
                          std::to_string(max_series_order));
}

}  // namespace

std::shared_ptr<const FluctuationModel> make_fluctuation_model(const PekarSolution& sol, int n_max,
                                                               std::size_t max_dim) {
    auto m = std::make_shared<FluctuationModel>();
    m->sol = sol;
    m->hessian = hessian_matrix(sol);
    m->fock = std::make_shared<const FockSpace>(build_fock(sol.model.M(), n_max, max_dim));
    m->ps = make_product_space(m->sol, m->fock);
    m->bog = bogoliubov_hamiltonian(*m->fock, m->hessian.G);
    m->spectrum = diagonalize(m->bog);
    return m;
}

SeriesContext make_series_context(std::shared_ptr<const FluctuationModel> model, int n, double cluster_tol) {
    SeriesContext ctx;
    ctx.model = std::move(model);
    ctx.n = n;
    ctx.group = eigenpair_group(ctx.model->spectrum, n, cluster_tol);
    ctx.resolvent = fock_reduced_resolvent(ctx.model->spectrum, ctx.group);
    return ctx;
}

std::vector<std::vector<int>> compositions(int total, int min_parts) {
    std::vector<std::vector<int>> out;
    for (int parts = std::max(1, min_parts); parts <= total; ++parts) {
        std::vector<int> cur;
        auto rec = [&](auto&& self, int left, int slots) -> void {
            if (slots == 0) {
                if (left == 0) out.push_back(cur);
                return;
            }
            for (int v = 1; v <= left - (slots - 1); ++v) {
                cur.push_back(v);
                self(self, left - v, slots - 1);
                cur.pop_back();
            }
        };
        rec(rec, total, parts);
    }
    return out;
}

Block apply_V(const SeriesContext& ctx, int e, const Block& in, const std::vector<double>& E) {
    const ProductSpace& ps = ctx.ps();
    if (e == 1) return apply_V1(ps, in);
    if (e == 2) {
        require_E(E, 0, "V_2");
        return apply_number(ps, in) - E[0] * in;
    }
    require_E(E, e - 2, "V_l");
    return -E[e - 2] * in;
}

std::vector<Block> suffix_chain(const SeriesContext& ctx, const Eigen::MatrixXd& X, int tmax,
                                const std::vector<double>& E) {
    check_order(tmax);
    const ProductSpace& ps = ctx.ps();
    std::vector<Block> T;
    T.reserve(tmax + 1);
    T.push_back(embed(ps, X));
    for (int t = 1; t <= tmax; ++t) {
        // R V_e acting on T_0 = P(...) vanishes unless e = 1.
        Block acc = apply_V1(ps, T[t - 1]);
        if (t >= 3) {
            require_E(E, 0, "suffix chain");
            acc += apply_number(ps, T[t - 2]) - E[0] * T[t - 2];
        }
        for (int e = 3; e <= t - 1; ++e) {
            require_E(E, e - 2, "suffix chain");
            acc -= E[e - 2] * T[t - e];
        }
        T.push_back(apply_R(ps, acc));
    }
    return T;
}

std::vector<Eigen::MatrixXd> apply_nested_tilde(const SeriesContext& ctx, const Eigen::MatrixXd& X, int lmax,
                                                const std::vector<double>& E) {
    const ProductSpace& ps = ctx.ps();
    const auto T = suffix_chain(ctx, X, lmax + 1, E);
    std::vector<Eigen::MatrixXd> out;
    for (int l = 0; l <= lmax; ++l) {
        Eigen::MatrixXd v = project(ps, apply_V1(ps, T[l + 1]));
        if (l == 0) v += ps.number.asDiagonal() * X;
        out.push_back(std::move(v));
    }
    return out;
}

Eigen::MatrixXd apply_chain_explicit(const SeriesContext& ctx, const std::vector<int>& parts,
                                     const Eigen::MatrixXd& X, const std::vector<double>& E) {
    const ProductSpace& ps = ctx.ps();
    Block Y = embed(ps, X);
    for (std::size_t i = parts.size(); i-- > 0;) {
        Y = apply_V(ctx, parts[i], Y, E);
        if (i > 0) Y = apply_R(ps, Y);
    }
    return project(ps, Y);
}

Eigen::MatrixXd apply_nested_tilde_explicit(const SeriesContext& ctx, const Eigen::MatrixXd& X, int l,
                                            const std::vector<double>& E) {
    check_order(l);
    CompensatedSum acc;
    if (l == 0) acc.add(ctx.ps().number.asDiagonal() * X);
    for (const auto& c : compositions(l + 2, 2)) acc.add(apply_chain_explicit(ctx, c, X, E));
    return acc.value();
}

NestedPair nested_V(const SeriesContext& ctx, int l, const std::vector<double>& E, int chunk) {
    const int D = ctx.ps().dim();
    NestedPair out{Eigen::MatrixXd(D, D), Eigen::MatrixXd(D, D)};
    for (int c0 = 0; c0 < D; c0 += chunk) {
        const int w = std::min(chunk, D - c0);
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(D, D).middleCols(c0, w);
        out.Vtilde.middleCols(c0, w) = apply_nested_tilde(ctx, I, l, E)[l];
    }
    require_E(E, l, "nested V");
    out.V = out.Vtilde - E[l] * Eigen::MatrixXd::Identity(D, D);
    return out;
}

Eigen::MatrixXd matrix_Mk(const SeriesContext& ctx, int k, const std::vector<double>& E) {
    if (k < 1) throw ConfigError("M_k is defined for k >= 1");
    require_E(E, k - 1, "M_k");
    const Eigen::MatrixXd& Gam = ctx.group.gamma;
    const Eigen::MatrixXd& Rf = ctx.resolvent.matrix;
    // S_t = sum_{e=1}^{t} Rf V_e S_{t-e}, S_0 = Gamma; W[t][e] = tilde-V_e S_t.
    std::vector<Eigen::MatrixXd> S{Gam};
    std::vector<std::vector<Eigen::MatrixXd>> W;
    for (int t = 0; t < k; ++t) {
        if (t >= 1) {
            Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(Gam.rows(), Gam.cols());
            for (int e = 1; e <= t; ++e) acc += W[t - e][e] - E[e] * S[t - e];
            S.push_back(Rf * acc);
        }
        W.push_back(apply_nested_tilde(ctx, S[t], k - t, E));
    }
    Eigen::MatrixXd bracket = W[0][k];
    for (int e = 1; e <= k - 1; ++e) bracket += W[k - e][e] - E[e] * S[k - e];
    Eigen::MatrixXd Mk = Gam.transpose() * bracket;
    return 0.5 * (Mk + Mk.transpose());
}

Eigen::MatrixXd matrix_Mk_explicit(const SeriesContext& ctx, int k, const std::vector<double>& E) {
    require_E(E, k - 1, "M_k");
    const Eigen::MatrixXd& Gam = ctx.group.gamma;
    const Eigen::MatrixXd& Rf = ctx.resolvent.matrix;
    auto V = [&](int e, const Eigen::MatrixXd& Y) -> Eigen::MatrixXd {
        return apply_nested_tilde_explicit(ctx, Y, e, E) - E[e] * Y;
    };
    CompensatedSum acc;
    acc.add(apply_nested_tilde_explicit(ctx, Gam, k, E));
    for (const auto& c : compositions(k, 2)) {
        Eigen::MatrixXd Y = Gam;
        for (std::size_t i = c.size(); i-- > 0;) {
            Y = V(c[i], Y);
            if (i > 0) Y = Rf * Y;
        }
        acc.add(Y);
    }
    Eigen::MatrixXd Mk = Gam.transpose() * acc.value();
    return 0.5 * (Mk + Mk.transpose());
}

SeriesResult coefficients_nondegenerate(const SeriesContext& ctx, int b, double odd_tol) {
    if (ctx.d() != 1) throw ConfigError("level is degenerate; use the degenerate recursion");
    if (b > max_series_order) throw ConfigError("b exceeds the series order guard");
    SeriesResult r;
    r.n = ctx.n;
    r.d = 1;
    r.E.push_back(ctx.group.energy);
    for (int l = 1; l <= b; ++l) {
        const Eigen::MatrixXd Ml = matrix_Mk(ctx, l, r.E);
        r.M.push_back(Ml);
        double v = Ml(0, 0);
        if (l % 2 == 1) {
            r.odd_raw.push_back(v);
            if (std::abs(v) > odd_tol * std::max(1.0, std::abs(r.E[l - 1])))
                throw NumericalError("odd coefficient E_" + std::to_string(l) + " = " + std::to_string(v) +
                                     " does not vanish");
            v = 0.0;
        }
        r.E.push_back(v);
    }
    return r;
}

SeriesResult coefficients_degenerate(const SeriesContext& ctx, int s, int b) {
    if (s < 1 || s > ctx.d()) throw ConfigError("branch index out of range");
    if (b > max_series_order) throw ConfigError("b exceeds the series order guard");
    SeriesResult r;
    r.n = ctx.n;
    r.s = s;
    r.d = ctx.d();
    r.E.push_back(ctx.group.energy);
    for (int l = 1; l <= b; ++l) {
        r.M.push_back(matrix_Mk(ctx, l, r.E));
        const auto br = eigenvalue_series(r.M);
        r.E.push_back(br[s - 1].coeffs[l - 1]);
        r.shared_branch = br[s - 1].shared;
    }
    return r;
}

double explicit_E2(const SeriesContext& ctx) {
    if (ctx.d() != 1) throw ConfigError("explicit E2 needs a non-degenerate level");
    const ProductSpace& ps = ctx.ps();
    const double E0 = ctx.group.energy;
    const Block x0 = embed(ps, ctx.group.gamma);
    const Block a = apply_R(ps, apply_V1(ps, x0));  // R phi psi(x)Gamma
    const Block Va = apply_V1(ps, a);
    const double number_term = column_dots(ps, a, apply_number(ps, a))[0];
    const double four_field = column_dots(ps, Va, apply_R(ps, Va))[0];
    const double resolvent_sq = column_dots(ps, a, a)[0];
    const Eigen::MatrixXd y = project(ps, apply_V1(ps, apply_R(ps, Va)));
    const double fock_term = (y.transpose() * ctx.resolvent.matrix * y)(0, 0);
    return number_term + four_field - E0 * resolvent_sq + fock_term;
}

double explicit_E4(const SeriesContext& ctx, const std::vector<double>& E) {
    if (ctx.d() != 1) throw ConfigError("explicit E4 needs a non-degenerate level");
    require_E(E, 2, "explicit E4");
    const Eigen::MatrixXd& g = ctx.group.gamma;
    const Eigen::MatrixXd& Rf = ctx.resolvent.matrix;
    auto tilde = [&](int l, const Eigen::MatrixXd& Y) { return apply_nested_tilde_explicit(ctx, Y, l, E); };
    auto plain = [&](int l, const Eigen::MatrixXd& Y) -> Eigen::MatrixXd { return tilde(l, Y) - E[l] * Y; };
    auto ip = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a.transpose() * b)(0, 0); };

    const Eigen::MatrixXd t1 = tilde(1, g), t2 = tilde(2, g), t3 = tilde(3, g), t4 = tilde(4, g);
    const Eigen::MatrixXd r1 = Rf * t1, r2 = Rf * t2;
    double val = ip(g, t4) + ip(t2, r2) + ip(r1, plain(2, r1)) + ip(r1, plain(1, Rf * plain(1, r1)));
    val += 2.0 * (ip(t3, r1) + ip(r1, plain(1, r2)));
    return val;
}

Eigen::MatrixXd first_order_coupling(const SeriesContext& ctx) {
    const ProductSpace& ps = ctx.ps();
    Block Y = embed(ps, ctx.group.gamma);
    Y = apply_R(ps, apply_bare_field(ps, Y));
    Y = apply_R(ps, apply_V1(ps, Y));
    const Eigen::MatrixXd out = project(ps, apply_bare_field(ps, Y));
    return ctx.group.gamma.transpose() * out;
}

double parity_identity_defect(const SeriesContext& ctx, int l, const std::vector<double>& E) {
    const ProductSpace& ps = ctx.ps();
    const Block x0 = embed(ps, ctx.group.gamma);
    const Eigen::MatrixXd pv1p = ctx.group.gamma.transpose() * project(ps, apply_V1(ps, x0));
    const Block chain = apply_V(ctx, l + 1, apply_R(ps, apply_V1(ps, x0)), E);
    const Eigen::MatrixXd m = ctx.group.gamma.transpose() * project(ps, chain);
    return std::max(pv1p.cwiseAbs().maxCoeff(), (m + m.transpose()).cwiseAbs().maxCoeff());
}

}  // namespace polaron
