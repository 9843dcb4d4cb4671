#include "polaron/branch_series.hpp"

#include <algorithm>
#include <cmath>

namespace polaron {
namespace {

using Series = std::vector<Eigen::MatrixXd>;

// Branches of A(x) = sum_{k<n} x^k A_k, each with n coefficients.
std::vector<EigenBranch> branches(const Series& A, int d, double rel_tol) {
    const int n = static_cast<int>(A.size());
    if (n == 0) {
        std::vector<EigenBranch> out(d);
        for (auto& b : out) b.shared = d > 1;
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A[0] + A[0].transpose()));
    const Eigen::VectorXd a = es.eigenvalues();
    const Eigen::MatrixXd V = es.eigenvectors();
    Series T(n);
    for (int k = 0; k < n; ++k) {
        T[k] = V.transpose() * A[k] * V;
        T[k] = 0.5 * (T[k] + T[k].transpose()).eval();
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());

    std::vector<std::pair<int, int>> clusters;  // [start, size)
    for (int i = 0; i < d;) {
        int j = i + 1;
        while (j < d && a[j] - a[j - 1] <= rel_tol * scale) ++j;
        clusters.emplace_back(i, j - i);
        i = j;
    }

    std::vector<EigenBranch> out;
    for (const auto& [start, p] : clusters) {
        const double abar = a.segment(start, p).mean();
        std::vector<int> P, Q;
        for (int i = 0; i < d; ++i) (i >= start && i < start + p ? P : Q).push_back(i);
        const int q = static_cast<int>(Q.size());
        auto sub = [&](const Eigen::MatrixXd& Mx, const std::vector<int>& r, const std::vector<int>& c) {
            Eigen::MatrixXd S(r.size(), c.size());
            for (std::size_t i = 0; i < r.size(); ++i)
                for (std::size_t j = 0; j < c.size(); ++j) S(i, j) = Mx(r[i], c[j]);
            return S;
        };
        Series PP(n), PQ(n), QP(n), QQ(n);
        for (int k = 0; k < n; ++k) {
            PP[k] = sub(T[k], P, P);
            PQ[k] = sub(T[k], P, Q);
            QP[k] = sub(T[k], Q, P);
            QQ[k] = sub(T[k], Q, Q);
        }

        // Graph of the invariant subspace over the cluster: columns [I; Y(x)].
        Series Y(n, Eigen::MatrixXd::Zero(q, p));
        for (int k = 1; k < n; ++k) {
            Eigen::MatrixXd rhs = -QP[k];
            for (int j = 1; j < k; ++j) rhs -= QQ[j] * Y[k - j];
            for (int i = 1; i < k; ++i) rhs += Y[i] * PP[k - i];
            for (int i = 1; i < k; ++i)
                for (int j = 1; i + j < k; ++j) rhs += Y[i] * PQ[j] * Y[k - i - j];
            for (int r = 0; r < q; ++r)
                for (int c = 0; c < p; ++c) Y[k](r, c) = rhs(r, c) / (a[Q[r]] - a[P[c]]);
        }

        // Compression onto the orthonormalized graph basis.
        Series F(n, Eigen::MatrixXd::Zero(p, p));
        for (int k = 0; k < n; ++k) {
            F[k] += PP[k];
            for (int j = 0; j <= k; ++j) {
                const int m = k - j;
                if (m >= 1) F[k] += PQ[j] * Y[m] + Y[m].transpose() * QP[j];
                for (int i = 1; i + m <= k && m >= 1; ++i) {
                    const int jj = k - i - m;
                    if (jj >= 0) F[k] += Y[i].transpose() * QQ[jj] * Y[m];
                }
            }
        }
        Series N(n, Eigen::MatrixXd::Zero(p, p));
        N[0] = Eigen::MatrixXd::Identity(p, p);
        for (int k = 2; k < n; ++k)
            for (int i = 1; i < k; ++i) N[k] += Y[i].transpose() * Y[k - i];
        Series Ninv(n, Eigen::MatrixXd::Zero(p, p));
        Ninv[0] = Eigen::MatrixXd::Identity(p, p);
        for (int k = 1; k < n; ++k)
            for (int i = 1; i <= k; ++i) Ninv[k] -= N[i] * Ninv[k - i];
        Series Z(n, Eigen::MatrixXd::Zero(p, p));
        Z[0] = Eigen::MatrixXd::Identity(p, p);
        for (int k = 1; k < n; ++k) {
            Eigen::MatrixXd s = Ninv[k];
            for (int i = 1; i < k; ++i) s -= Z[i] * Z[k - i];
            Z[k] = 0.5 * (s + s.transpose());
        }
        Series S(n, Eigen::MatrixXd::Zero(p, p));
        for (int k = 0; k < n; ++k) {
            for (int i = 0; i <= k; ++i)
                for (int j = 0; i + j <= k; ++j) S[k] += Z[i] * F[j] * Z[k - i - j];
            S[k] = 0.5 * (S[k] + S[k].transpose()).eval();
        }

        Series next(S.begin() + 1, S.end());
        auto sub_branches = branches(next, p, rel_tol);
        for (auto& b : sub_branches) {
            b.coeffs.insert(b.coeffs.begin(), abar);
            out.push_back(std::move(b));
        }
    }
    return out;
}

}  // namespace

std::vector<EigenBranch> eigenvalue_series(const std::vector<Eigen::MatrixXd>& M, double rel_tol) {
    if (M.empty()) return {};
    const int d = static_cast<int>(M[0].rows());
    return branches(M, d, rel_tol);
}

double branch_series_deviation(const std::vector<Eigen::MatrixXd>& M, const std::vector<EigenBranch>& br,
                               double x) {
    const Eigen::Index d = M[0].rows();
    Eigen::MatrixXd Mx = Eigen::MatrixXd::Zero(d, d);
    double xp = 1.0;
    for (const auto& Mk : M) {
        xp *= x;
        Mx += xp * Mk;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Mx + Mx.transpose()));
    double dev = 0.0;
    for (Eigen::Index s = 0; s < d; ++s) {
        double v = 0.0, p = 1.0;
        for (double c : br[s].coeffs) {
            p *= x;
            v += c * p;
        }
        dev = std::max(dev, std::abs(es.eigenvalues()[s] - v));
    }
    return dev;
}

}  // namespace polaron
