#include "polaron/oracle.hpp"

#include "polaron/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace polaron {
namespace {

Eigen::VectorXd per_row(const ProductSpace& ps, const Eigen::VectorXd& per_vector) {
    return per_vector.transpose().replicate(ps.K, 1).reshaped();
}

Eigen::VectorXd reduce_rows(const ProductSpace& ps, const Eigen::VectorXd& rows) {
    return Eigen::Map<const Eigen::MatrixXd>(rows.data(), ps.K, rows.size() / ps.K).colwise().sum().transpose();
}

// A = H0 + alpha^{-2} N + alpha^{-1} Q V1 Q on Q-valued blocks of ncols vectors.
struct QSystem {
    const ProductSpace& ps;
    double alpha;
    Eigen::Index ncols;
    Eigen::ArrayXd mask;                // 1/alpha off psi^P rows, 0 on them
    std::vector<Eigen::ArrayXd> diag;   // H0 + alpha^{-2} n per total occupancy n
    std::vector<Eigen::ArrayXd> inv;    // Jacobi preconditioner, 0 on psi^P rows

    QSystem(const ProductSpace& p, double a, Eigen::Index nc) : ps(p), alpha(a), ncols(nc) {
        Eigen::ArrayXd eps = ps.eps.replicate(nc, 1).array();
        mask = Eigen::ArrayXd::Constant(eps.size(), 1.0 / a);
        for (Eigen::Index c = 0; c < nc; ++c) mask[ps.K * c] = 0.0;
        const int nmax = static_cast<int>(ps.number.maxCoeff());
        for (int n = 0; n <= nmax; ++n) {
            diag.push_back(eps + n / (a * a));
            inv.push_back((mask > 0.0).select(1.0 / diag.back(), 0.0));
        }
    }

    int occ(Eigen::Index f) const { return static_cast<int>(ps.number[f]); }

    // y = A x and the per-vector <x, A x>
    Block apply(const Block& x, Eigen::VectorXd& xAx) const {
        Block y = apply_V1(ps, x);
        Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(x.rows());
        for (Eigen::Index f = 0; f < x.cols(); ++f) {
            y.col(f).array() = mask * y.col(f).array() + diag[occ(f)] * x.col(f).array();
            acc += x.col(f).array() * y.col(f).array();
        }
        xAx = reduce_rows(ps, acc.matrix());
        return y;
    }
};

Block pcg(const QSystem& sys, const Block& rhs, double tol, int max_iter, int& iterations) {
    const ProductSpace& ps = sys.ps;
    const Eigen::Index nf = rhs.cols();
    Block x = Block::Zero(rhs.rows(), nf);
    Block r = rhs;
    Block z(rhs.rows(), nf);
    Eigen::ArrayXd acc_rz = Eigen::ArrayXd::Zero(rhs.rows()), acc_bb = acc_rz;
    for (Eigen::Index f = 0; f < nf; ++f) {
        z.col(f).array() = sys.inv[sys.occ(f)] * r.col(f).array();
        acc_rz += r.col(f).array() * z.col(f).array();
        acc_bb += r.col(f).array().square();
    }
    Eigen::VectorXd rz = reduce_rows(ps, acc_rz.matrix());
    const Eigen::VectorXd bnorm = reduce_rows(ps, acc_bb.matrix()).cwiseSqrt();
    Block p = z;
    double best = std::numeric_limits<double>::infinity();
    int stalled = 0;
    double worst = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd pAp;
        const Block Ap = sys.apply(p, pAp);
        Eigen::VectorXd a(rz.size());
        for (Eigen::Index c = 0; c < a.size(); ++c) a[c] = pAp[c] > 0.0 ? rz[c] / pAp[c] : 0.0;
        const Eigen::ArrayXd ta = per_row(ps, a).array();
        Eigen::ArrayXd acc_rr = Eigen::ArrayXd::Zero(rhs.rows());
        acc_rz.setZero();
        for (Eigen::Index f = 0; f < nf; ++f) {
            x.col(f).array() += ta * p.col(f).array();
            r.col(f).array() -= ta * Ap.col(f).array();
            z.col(f).array() = sys.inv[sys.occ(f)] * r.col(f).array();
            acc_rr += r.col(f).array().square();
            acc_rz += r.col(f).array() * z.col(f).array();
        }
        ++iterations;
        const Eigen::VectorXd rn = reduce_rows(ps, acc_rr.matrix()).cwiseSqrt();
        worst = 0.0;
        for (Eigen::Index c = 0; c < rn.size(); ++c)
            if (bnorm[c] > 0.0) worst = std::max(worst, rn[c] / bnorm[c]);
        if (worst <= tol) break;
        if (worst < 0.9 * best) {
            best = worst;
            stalled = 0;
        } else if (++stalled >= 10) {
            break;
        }
        const Eigen::VectorXd rz_new = reduce_rows(ps, acc_rz.matrix());
        Eigen::VectorXd beta(rz.size());
        for (Eigen::Index c = 0; c < beta.size(); ++c) beta[c] = rz[c] > 0.0 ? rz_new[c] / rz[c] : 0.0;
        rz = rz_new;
        const Eigen::ArrayXd tb = per_row(ps, beta).array();
        for (Eigen::Index f = 0; f < nf; ++f) p.col(f).array() = z.col(f).array() + tb * p.col(f).array();
    }
    if (worst > std::max(tol, 1e-10)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "PCG on the excited electron space stalled at relative residual %.3e", worst);
        throw NumericalError(msg);
    }
    return x;
}

// Fock states reachable from each state by one ladder move of any mode.
std::vector<std::vector<int>> neighbours(const FockSpace& fock) {
    std::vector<std::set<int>> s(fock.dim());
    for (const auto& hops : fock.hops)
        for (const Hop& h : hops) {
            s[h.from].insert(h.to);
            s[h.to].insert(h.from);
        }
    std::vector<std::vector<int>> out(fock.dim());
    for (int i = 0; i < fock.dim(); ++i) out[i].assign(s[i].begin(), s[i].end());
    return out;
}

// <Y_c, Z_c'> for Y supported on Fock neighbours of c.
Eigen::MatrixXd sparse_gram(const ProductSpace& ps, const std::vector<std::vector<int>>& nb, const Block& Y,
                            const Block& Z) {
    const int D = ps.dim(), K = ps.K;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(D, D);
    for (int c = 0; c < D; ++c)
        for (int f : nb[c]) {
            const Eigen::Map<const Eigen::MatrixXd> Zf(Z.col(f).data(), K, D);
            G.row(c).noalias() += Y.col(f).segment(K * c, K).transpose() * Zf;
        }
    return G;
}

}  // namespace

Eigen::MatrixXd fluctuation_hamiltonian(const FluctuationModel& model, double alpha, int max_dim) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    const ProductSpace& ps = model.ps;
    const int n = ps.K * ps.dim();
    if (n > max_dim) throw ConfigError("dense fluctuation Hamiltonian of dimension " + std::to_string(n) +
                                       " exceeds the budget " + std::to_string(max_dim));
    Eigen::MatrixXd H(n, n);
    const int D = ps.dim();
    for (int f = 0; f < D; ++f)
        for (int m = 0; m < ps.K; ++m) {
            Block e = ps.zeros(1);
            e(m, f) = 1.0;
            Block y = apply_V1(ps, e) / alpha;
            y(m, f) += ps.eps[m] + ps.number[f] / (alpha * alpha);
            H.col(m + ps.K * f) = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
        }
    return 0.5 * (H + H.transpose());
}

Eigen::VectorXd dense_levels(const FluctuationModel& model, double alpha, int levels, int max_dim) {
    if (std::isinf(alpha)) return Eigen::VectorXd::Zero(levels);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fluctuation_hamiltonian(model, alpha, max_dim),
                                                      Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    return es.eigenvalues().head(levels);
}

LevelSet feshbach_levels(const FluctuationModel& model, double alpha, int levels, const OracleOptions& opts) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    const ProductSpace& ps = model.ps;
    const int D = ps.dim();
    if (levels < 1 || levels > D) throw ConfigError("level count out of range");
    const Eigen::VectorXd& E = model.spectrum.values;
    const Eigen::MatrixXd& Gv = model.spectrum.vectors;

    // Clusters for the requested levels.
    std::vector<EigenGroup> groups;
    for (int n = 1; n <= levels; ++n) {
        EigenGroup g = eigenpair_group(model.spectrum, n, opts.cluster_tol);
        if (groups.empty() || groups.back().first != g.first) groups.push_back(std::move(g));
    }
    double zmax = 0.0;
    for (const auto& g : groups) zmax = std::max(zmax, std::abs(g.energy) + 1.0);
    zmax /= alpha * alpha;
    const double rho = 2.0 * zmax / ps.eps[1];

    const QSystem sys(ps, alpha, D);
    Block b = apply_V1(ps, embed(ps, Eigen::MatrixXd::Identity(D, D)));
    remove_ground(ps, b);
    Block Y = b;
    {
        const Eigen::VectorXd t = ps.resolvent_diag.replicate(D, 1);
        for (Eigen::Index f = 0; f < Y.cols(); ++f) Y.col(f).array() *= -t.array();
    }
    const auto nb = neighbours(*ps.fock);

    LevelSet out;
    out.alpha = alpha;
    // F_k = Y^T (alpha^{-2} N + W) Z_{k+1} - Y^T Z_k, transformed to the Bogoliubov eigenbasis.
    std::vector<Eigen::MatrixXd> F;
    Block Zprev = b;
    for (int k = 0; k < opts.max_series_terms; ++k) {
        const double tol = std::min(1e-8, std::max(opts.pcg_tol, 1e-16 / std::pow(rho, k)));
        Block Z = pcg(sys, Zprev, tol, opts.pcg_max_iter, out.pcg_iterations);
        Block WZ = apply_V1(ps, Z) / alpha;
        remove_ground(ps, WZ);
        WZ += apply_number(ps, Z) / (alpha * alpha);
        Eigen::MatrixXd Fk = sparse_gram(ps, nb, Y, WZ);
        if (k >= 1) Fk -= sparse_gram(ps, nb, Y, Zprev);
        Fk = (Gv.transpose() * (0.5 * (Fk + Fk.transpose())) * Gv).eval();
        F.push_back(0.5 * (Fk + Fk.transpose()));
        Zprev = std::move(Z);
        if (std::pow(rho, k + 1) < opts.series_tol) break;
    }
    out.series_terms = static_cast<int>(F.size());

    out.base.resize(levels);
    out.shift.resize(levels);
    int n = 0;
    for (const auto& g : groups) {
        std::vector<int> qi;
        for (int i = 0; i < D; ++i)
            if (i < g.first || i >= g.first + g.d) qi.push_back(i);
        const int nq = static_cast<int>(qi.size());
        auto H_at = [&](double delta) {
            const double z = (g.energy + delta) / (alpha * alpha);
            Eigen::MatrixXd H = F.back();
            for (int k = static_cast<int>(F.size()) - 2; k >= 0; --k) H = (F[k] + z * H).eval();
            H.diagonal() += (E.array() - g.energy).matrix();
            return H;
        };
        auto effective = [&](double delta) {
            const Eigen::MatrixXd H = H_at(delta);
            Eigen::MatrixXd Hcc = H.block(g.first, g.first, g.d, g.d);
            Eigen::MatrixXd Hqc(nq, g.d), Hqq(nq, nq);
            for (int a = 0; a < nq; ++a) {
                for (int c = 0; c < g.d; ++c) Hqc(a, c) = H(qi[a], g.first + c);
                for (int c = 0; c < nq; ++c) Hqq(a, c) = -H(qi[a], qi[c]);
                Hqq(a, a) += delta;
            }
            Eigen::MatrixXd Meff = Hcc + Hqc.transpose() * Hqq.partialPivLu().solve(Hqc);
            return Eigen::MatrixXd(0.5 * (Meff + Meff.transpose()));
        };
        for (int s = 0; s < g.d && n < levels; ++s, ++n) {
            double delta = 0.0;
            for (int it = 0; it < opts.fixed_point_max_iter; ++it) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(effective(delta), Eigen::EigenvaluesOnly);
                const double next = es.eigenvalues()[s];
                const double step = std::abs(next - delta);
                delta = next;
                if (step <= opts.fixed_point_tol * std::max(1.0, std::abs(g.energy))) break;
                if (it + 1 == opts.fixed_point_max_iter && step > 1e-13)
                    throw NumericalError("inner fixed point did not converge");
            }
            out.base[n] = g.energy;
            out.shift[n] = delta;
        }
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw ConfigError("invalid alpha grid");
    std::vector<double> a;
    for (int i = 0; i < count; ++i)
        a.push_back(count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return a;
}

SpectralSweep exact_levels(const FluctuationModel& model, const std::vector<double>& alphas, int levels,
                           const OracleOptions& opts) {
    if (alphas.empty()) throw ConfigError("alpha grid is empty");
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (!(alphas[i] > alphas[i - 1])) throw ConfigError("alpha grid must be strictly ascending");
    SpectralSweep sw;
    sw.alphas = alphas;
    sw.levels = levels;
    const int na = static_cast<int>(alphas.size());
    sw.eigenvalues.resize(na, levels);
    sw.base.resize(na, levels);
    sw.shift.resize(na, levels);
    for (int i = 0; i < na; ++i) {
        const double a = alphas[i];
        if (std::isinf(a)) {
            for (int n = 0; n < levels; ++n) {
                sw.base(i, n) = eigenpair_group(model.spectrum, n + 1, opts.cluster_tol).energy;
                sw.shift(i, n) = 0.0;
                sw.eigenvalues(i, n) = 0.0;
            }
            continue;
        }
        const LevelSet ls = feshbach_levels(model, a, levels, opts);
        sw.base.row(i) = ls.base.transpose();
        sw.shift.row(i) = ls.shift.transpose();
        sw.eigenvalues.row(i) = ((ls.base + ls.shift) / (a * a)).transpose();
    }
    for (int i = 0; i < na; ++i)
        for (int n = 1; n < levels; ++n)
            if (sw.eigenvalues(i, n) < sw.eigenvalues(i, n - 1) - 1e-14 * std::abs(sw.eigenvalues(i, n)))
                throw NumericalError("oracle levels out of order at alpha = " + std::to_string(sw.alphas[i]));
    return sw;
}

}  // namespace polaron
