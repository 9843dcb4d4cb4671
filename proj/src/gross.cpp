#include "polaron/gross.hpp"

#include "polaron/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

namespace polaron {
namespace {

using Op = std::function<Block(const Block&)>;

Eigen::Map<const Eigen::MatrixXd> electron_view(const ProductSpace& ps, const Block& b) {
    return {b.data(), ps.K, b.size() / ps.K};
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// ad_A^k(X) v = sum_i C(k,i) (-1)^i A^{k-i} X A^i v
Block apply_ad(const GrossContext& g, int k, const Op& X, const Block& v) {
    if (k == 0) return X(v);
    Block out = Block::Zero(v.rows(), v.cols());
    if (g.trivial()) return out;
    Block Ai = v;
    for (int i = 0; i <= k; ++i) {
        Block w = X(Ai);
        for (int r = 0; r < k - i; ++r) w = apply_A(g, w);
        out += ((i % 2 == 0) ? 1.0 : -1.0) * binomial(k, i) * w;
        if (i < k) Ai = apply_A(g, Ai);
    }
    return out;
}

Eigen::MatrixXd chain_K(const GrossContext& g, const std::vector<int>& parts, const Eigen::MatrixXd& X) {
    const ProductSpace& ps = g.model->ps;
    Block Y = embed(ps, X);
    for (std::size_t i = parts.size(); i-- > 0;) {
        Y = apply_K(g, parts[i], Y);
        if (i > 0) Y = apply_R(ps, Y);
    }
    return project(ps, Y);
}

}  // namespace

std::vector<int> inside_modes(const ElectronModel& model, double cutoff) {
    std::vector<int> in;
    for (int j = 0; j < model.M(); ++j)
        if (std::isinf(cutoff) || model.lambda[j] <= cutoff * cutoff) in.push_back(j);
    return in;
}

GrossContext build_K(std::shared_ptr<const FluctuationModel> model, double cutoff, std::vector<double> E) {
    if (!(cutoff >= 0.0)) throw ConfigError("cutoff must be nonnegative");
    GrossContext g;
    g.model = std::move(model);
    g.cutoff = cutoff;
    g.E = std::move(E);
    const PekarSolution& sol = g.model->sol;
    const auto in = inside_modes(sol.model, cutoff);
    const Eigen::MatrixXd& U = sol.h0_vectors;
    for (int j = 0; j < sol.model.M(); ++j) {
        const bool inside = std::find(in.begin(), in.end(), j) != in.end();
        if (inside) {
            g.generator.push_back(Eigen::MatrixXd::Zero(sol.model.K(), sol.model.K()));
            continue;
        }
        g.outside.push_back(j);
        Eigen::MatrixXd G = U.transpose() * (-sol.model.B[j] / sol.model.lambda[j]) * U;
        g.generator.push_back(0.5 * (G + G.transpose()));
    }
    return g;
}

Block apply_A(const GrossContext& g, const Block& in) {
    const ProductSpace& ps = g.model->ps;
    Block out = Block::Zero(in.rows(), in.cols());
    Block tmp(in.rows(), in.cols());
    for (int j : g.outside) {
        Eigen::Map<Eigen::MatrixXd>(tmp.data(), ps.K, tmp.size() / ps.K).noalias() =
            g.generator[j] * electron_view(ps, in);
        add_mode(ps, j, -1, tmp, out);
    }
    return out;
}

Block apply_K_raw(const GrossContext& g, int l, const Block& in) {
    if (l < 1) throw ConfigError("K_l is defined for l >= 1");
    const ProductSpace& ps = g.model->ps;
    const Op H0 = [&](const Block& v) { return apply_H0(ps, v); };
    const Op V1 = [&](const Block& v) { return apply_V1(ps, v); };
    const Op N = [&](const Block& v) { return apply_number(ps, v); };
    Block out = Block::Zero(in.rows(), in.cols());
    if (!g.trivial()) out += apply_ad(g, l, H0, in) / factorial(l);
    if (l - 1 == 0 || !g.trivial()) out += apply_ad(g, l - 1, V1, in) / factorial(l - 1);
    if (l >= 2 && (l - 2 == 0 || !g.trivial())) out += apply_ad(g, l - 2, N, in) / factorial(l - 2);
    return out;
}

Block apply_K(const GrossContext& g, int l, const Block& in) {
    Block out = apply_K_raw(g, l, in);
    if (l >= 2) {
        if (static_cast<int>(g.E.size()) <= l - 2)
            throw ConfigError("K_" + std::to_string(l) + " needs E_" + std::to_string(l - 2));
        out -= g.E[l - 2] * in;
    }
    return out;
}

IdentityReport verify_bogoliubov_identity(const GrossContext& g, int chunk) {
    const ProductSpace& ps = g.model->ps;
    const int D = ps.dim();
    const double E0 = g.E.empty() ? 0.0 : g.E[0];
    GrossContext gg = g;
    if (gg.E.empty()) gg.E = {E0};
    IdentityReport rep;
    for (int c0 = 0; c0 < D; c0 += chunk) {
        const int w = std::min(chunk, D - c0);
        const Block Y = embed(ps, Eigen::MatrixXd::Identity(D, D).middleCols(c0, w));
        const Block K1Y = apply_K(gg, 1, Y);
        const Eigen::MatrixXd pk1p = project(ps, K1Y);
        const Eigen::MatrixXd lhs =
            pk1p + project(ps, apply_K(gg, 2, Y)) + project(ps, apply_K(gg, 1, apply_R(ps, K1Y)));
        Eigen::MatrixXd rhs = g.model->bog.middleCols(c0, w);
        for (int c = 0; c < w; ++c) rhs(c0 + c, c) -= E0;
        rep.deviation = std::max(rep.deviation, (lhs - rhs).cwiseAbs().maxCoeff());
        rep.pk1p = std::max(rep.pk1p, pk1p.cwiseAbs().maxCoeff());
    }
    return rep;
}

double hermiticity_defect(const GrossContext& g, int l, std::uint64_t seed) {
    const ProductSpace& ps = g.model->ps;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Block x = ps.zeros(1), y = ps.zeros(1);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = nd(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = nd(rng);
    x /= x.norm();
    y /= y.norm();
    GrossContext gg = g;
    gg.E.resize(std::max<std::size_t>(gg.E.size(), static_cast<std::size_t>(std::max(0, l - 1))), 0.0);
    const double a = column_dots(ps, x, apply_K(gg, l, y))[0];
    const double b = column_dots(ps, apply_K(gg, l, x), y)[0];
    return std::abs(a - b);
}

double g_norm(const GrossContext& g) {
    double s = 0.0;
    for (int j : g.outside) s += std::pow(g.model->sol.model.lambda[j], -3.0);
    return std::sqrt(s);
}

namespace {

Eigen::MatrixXd grid_multiplication(const Basis& basis, const Eigen::VectorXd& f) {
    const Eigen::MatrixXd& W = basis.values;
    Eigen::MatrixXd m = W.transpose() * (basis.weights.cwiseProduct(f)).asDiagonal() * W;
    return 0.5 * (m + m.transpose());
}

}  // namespace

double uv_identity_deviation(const Basis& basis, double cutoff) {
    const auto in = uv_projection(basis, cutoff);
    const Eigen::MatrixXd lap = negative_laplacian_values(basis);
    const auto B = coupling_matrices(basis);
    double dev = 0.0;
    for (int j = 0; j < basis.M(); ++j) {
        const bool inside = std::find(in.begin(), in.end(), j) != in.end();
        // g^Lambda_j = -lambda_j^{-3/2} w_j outside Pi, so p^2 g = lambda_j^{-3/2} Laplacian(w_j)
        Eigen::MatrixXd p2g = Eigen::MatrixXd::Zero(basis.K(), basis.K());
        if (!inside) p2g = -std::pow(basis.lambda[j], -1.5) * grid_multiplication(basis, lap.col(j));
        const Eigen::MatrixXd pv = inside ? Eigen::MatrixXd::Zero(basis.K(), basis.K()) : Eigen::MatrixXd(-B[j]);
        dev = std::max(dev, (p2g - pv).cwiseAbs().maxCoeff());
    }
    return dev;
}

namespace {

// Coefficient of a_j in the momentum-coupled K1 pieces, original basis:
// Laplacian(g) + 2 grad g . grad, i.e. lambda^{-3/2} (-Lap w_j) - 2 lambda^{-3/2} D_j.
Eigen::MatrixXd lowering_coefficient(const Basis& basis, const Eigen::MatrixXd& lap,
                                     const std::vector<Eigen::MatrixXd>& D, int j) {
    const double s = std::pow(basis.lambda[j], -1.5);
    return s * grid_multiplication(basis, lap.col(j)) - 2.0 * s * D[j];
}

}  // namespace

double kinetic_assembly_deviation(const Basis& basis, double cutoff) {
    const auto in = uv_projection(basis, cutoff);
    const Eigen::MatrixXd lap = negative_laplacian_values(basis);
    const auto D = gradient_coupling_matrices(basis, basis.M());
    const auto B = coupling_matrices(basis);
    const Eigen::VectorXd lam = basis.lambda;
    double dev = 0.0;
    for (int j = 0; j < basis.M(); ++j) {
        if (std::find(in.begin(), in.end(), j) != in.end()) continue;
        const Eigen::MatrixXd G = -B[j] / lam[j];
        const Eigen::MatrixXd comm = G * lam.asDiagonal() - lam.asDiagonal() * G;
        const Eigen::MatrixXd C = lowering_coefficient(basis, lap, D, j);
        dev = std::max(dev, (C - comm).cwiseAbs().maxCoeff());
        // the raising coefficient is the transpose and must equal -C
        dev = std::max(dev, (C.transpose() + C).cwiseAbs().maxCoeff());
    }
    return dev;
}

double textbook_K1_deviation(const GrossContext& g, const Basis& basis) {
    const Eigen::MatrixXd lap = negative_laplacian_values(basis);
    const auto D = gradient_coupling_matrices(basis, basis.M());
    const Eigen::MatrixXd& U = g.model->sol.h0_vectors;
    const Eigen::VectorXd& eps = g.model->ps.eps;
    double dev = 0.0;
    for (int j : g.outside) {
        const Eigen::MatrixXd C = U.transpose() * lowering_coefficient(basis, lap, D, j) * U;
        const Eigen::MatrixXd& G = g.generator[j];
        const Eigen::MatrixXd comm = G * eps.asDiagonal() - eps.asDiagonal() * G;
        dev = std::max(dev, (C - comm).cwiseAbs().maxCoeff());
    }
    return dev;
}

ApproximateState approximate_eigenstate(const GrossContext& g, const SeriesContext& ctx, const SeriesResult& sr,
                                        double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    const int b = static_cast<int>(sr.E.size()) - 1;
    if (b < 0) throw ConfigError("approximate eigenstate needs E_0");
    const ProductSpace& ps = ctx.ps();
    const std::vector<double>& E = sr.E;

    // U Gamma_s: for d >= 2 the eigenvector of M^(b) = sum alpha^{-k} M_k.
    Eigen::MatrixXd u;
    if (ctx.d() == 1) {
        u = ctx.group.gamma;
    } else {
        Eigen::MatrixXd Mb = Eigen::MatrixXd::Zero(ctx.d(), ctx.d());
        for (int k = 1; k <= b && k <= static_cast<int>(sr.M.size()); ++k) Mb += std::pow(alpha, -k) * sr.M[k - 1];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Mb);
        u = ctx.group.gamma * es.eigenvectors().col(sr.s - 1);
    }

    // xi_b = sum_{j<=b} (RR V)^j u
    Eigen::MatrixXd xi = u, term = u;
    for (int j = 1; j <= b; ++j) {
        const auto tilde = apply_nested_tilde(ctx, term, b, E);
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(term.rows(), term.cols());
        for (int l = 1; l <= b; ++l) v += std::pow(alpha, -l) * (tilde[l] - E[l] * term);
        term = ctx.resolvent.apply(v);
        xi += term;
    }

    GrossContext gg = g;
    gg.E = E;
    auto applyK = [&](const Block& v) {
        Block out = Block::Zero(v.rows(), v.cols());
        for (int l = 1; l <= b + 2; ++l) out += std::pow(alpha, -l) * apply_K(gg, l, v);
        return out;
    };
    ApproximateState st;
    st.b = b;
    Block t = embed(ps, xi);
    st.psi = t;
    for (int i = 1; i <= 2 * b + 3; ++i) {
        t = apply_R(ps, applyK(t));
        st.psi += t;
    }
    st.norm = std::sqrt(column_dots(ps, st.psi, st.psi)[0]);
    return st;
}

double residual_norm(const GrossContext& g, const ApproximateState& st, double alpha) {
    const ProductSpace& ps = g.model->ps;
    if (static_cast<int>(g.E.size()) < st.b + 1) throw ConfigError("residual needs E_0..E_b in the Gross context");
    Block r = apply_H0(ps, st.psi);
    for (int l = 1; l <= st.b + 2; ++l) r += std::pow(alpha, -l) * apply_K(g, l, st.psi);
    return std::sqrt(std::max(0.0, column_dots(ps, r, r)[0]));
}

std::vector<double> k_based_coefficients(const GrossContext& g, const SeriesContext& ctx, int b) {
    if (ctx.d() != 1) throw ConfigError("K-based recursion is implemented for non-degenerate levels");
    const Eigen::MatrixXd& Gam = ctx.group.gamma;
    const Eigen::MatrixXd& Rf = ctx.resolvent.matrix;
    const ProductSpace& ps = ctx.ps();
    GrossContext gg = g;
    gg.E = {ctx.group.energy};
    // tilde-V_l: chains with at least two parts plus the E-free single K_{l+2}.
    auto tilde = [&](int l, const Eigen::MatrixXd& X) {
        Eigen::MatrixXd acc = project(ps, apply_K_raw(gg, l + 2, embed(ps, X)));
        for (const auto& c : compositions(l + 2, 2)) acc += chain_K(gg, c, X);
        return acc;
    };
    for (int l = 1; l <= b; ++l) {
        auto plain = [&](int e, const Eigen::MatrixXd& Y) -> Eigen::MatrixXd { return tilde(e, Y) - gg.E[e] * Y; };
        Eigen::MatrixXd acc = tilde(l, Gam);
        for (const auto& c : compositions(l, 2)) {
            Eigen::MatrixXd Y = Gam;
            for (std::size_t i = c.size(); i-- > 0;) {
                Y = plain(c[i], Y);
                if (i > 0) Y = Rf * Y;
            }
            acc += Y;
        }
        gg.E.push_back((Gam.transpose() * acc)(0, 0));
    }
    return gg.E;
}

}  // namespace polaron
