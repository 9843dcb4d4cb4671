#include "polaron/fock.hpp"

#include "polaron/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

namespace polaron {
namespace {

void enumerate(int M, int remaining, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == M) {
        out.push_back(cur);
        return;
    }
    for (int n = 0; n <= remaining; ++n) {
        cur.push_back(n);
        enumerate(M, remaining - n, cur, out);
        cur.pop_back();
    }
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

SparseMatrix from_triplets(int dim, const std::vector<Eigen::Triplet<double>>& t) {
    SparseMatrix m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

// a_j a_j or a_j^dagger a_j^dagger style pair hops for one mode.
SparseMatrix mode_pair_lowering(const FockSpace& fock, int k) {
    std::vector<Eigen::Triplet<double>> t;
    for (int s = 0; s < fock.dim(); ++s) {
        const int n = fock.states[s][k];
        if (n < 2) continue;
        auto occ = fock.states[s];
        occ[k] -= 2;
        t.emplace_back(fock.find(occ), s, std::sqrt(double(n) * (n - 1)));
    }
    return from_triplets(fock.dim(), t);
}

}  // namespace

int FockSpace::find(const std::vector<int>& occ) const {
    auto it = index.find(occ);
    return it == index.end() ? -1 : it->second;
}

FockSpace build_fock(int M, int n_max, std::size_t max_dim) {
    if (M < 1 || n_max < 1) throw ConfigError("Fock space needs M >= 1 and N_max >= 1");
    const double dim = binomial(M + n_max, M);
    if (dim > static_cast<double>(max_dim))
        throw ConfigError("Fock dimension " + std::to_string(static_cast<long long>(dim)) +
                          " exceeds the memory budget of " + std::to_string(max_dim));
    FockSpace f;
    f.M = M;
    f.n_max = n_max;
    std::vector<int> cur;
    enumerate(M, n_max, cur, f.states);
    f.total.reserve(f.states.size());
    for (int s = 0; s < f.dim(); ++s) {
        int t = 0;
        for (int n : f.states[s]) t += n;
        f.total.push_back(t);
        f.index.emplace(f.states[s], s);
    }
    f.hops.resize(M);
    for (int j = 0; j < M; ++j) {
        for (int s = 0; s < f.dim(); ++s) {
            const int n = f.states[s][j];
            if (n == 0) continue;
            auto occ = f.states[s];
            --occ[j];
            f.hops[j].push_back({s, f.find(occ), std::sqrt(double(n))});
        }
    }
    return f;
}

std::pair<SparseMatrix, SparseMatrix> ladder(const FockSpace& fock, int j) {
    if (j < 0 || j >= fock.M) throw ConfigError("mode index out of range");
    std::vector<Eigen::Triplet<double>> t;
    for (const Hop& h : fock.hops[j]) t.emplace_back(h.to, h.from, h.amp);
    SparseMatrix a = from_triplets(fock.dim(), t);
    SparseMatrix ad = a.transpose();
    return {a, ad};
}

Eigen::VectorXd number_diagonal(const FockSpace& fock) {
    Eigen::VectorXd n(fock.dim());
    for (int s = 0; s < fock.dim(); ++s) n[s] = fock.total[s];
    return n;
}

FockOperator number_operator(const FockSpace& fock) {
    FockOperator op;
    op.matrix = SparseMatrix(fock.dim(), fock.dim());
    std::vector<Eigen::Triplet<double>> t;
    for (int s = 0; s < fock.dim(); ++s)
        if (fock.total[s]) t.emplace_back(s, s, fock.total[s]);
    op.matrix.setFromTriplets(t.begin(), t.end());
    op.hermitian = true;
    return op;
}

SparseMatrix annihilation(const FockSpace& fock, const Eigen::VectorXd& f) {
    std::vector<Eigen::Triplet<double>> t;
    for (int j = 0; j < fock.M; ++j)
        if (f[j] != 0.0)
            for (const Hop& h : fock.hops[j]) t.emplace_back(h.to, h.from, f[j] * h.amp);
    return from_triplets(fock.dim(), t);
}

SparseMatrix creation(const FockSpace& fock, const Eigen::VectorXd& f) {
    return SparseMatrix(annihilation(fock, f).transpose());
}

FockOperator field_operator(const FockSpace& fock, const Eigen::VectorXd& f) {
    FockOperator op;
    const SparseMatrix a = annihilation(fock, f);
    op.matrix = a + SparseMatrix(a.transpose());
    op.hermitian = true;
    op.bandwidth = 1;
    return op;
}

Eigen::MatrixXd bogoliubov_hamiltonian(const FockSpace& fock, const Eigen::MatrixXd& G) {
    const int M = fock.M;
    std::vector<SparseMatrix> X;
    for (int j = 0; j < M; ++j) X.push_back(field_operator(fock, Eigen::VectorXd::Unit(M, j)).matrix);
    SparseMatrix H = number_operator(fock).matrix;
    for (int j = 0; j < M; ++j)
        for (int k = 0; k < M; ++k)
            if (G(j, k) != 0.0) H += G(j, k) * SparseMatrix(X[j] * X[k]);
    Eigen::MatrixXd D = H;
    return 0.5 * (D + D.transpose());
}

FockSpectrum diagonalize(const Eigen::MatrixXd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw NumericalError("Fock eigensolver failed");
    FockSpectrum s{es.eigenvalues(), es.eigenvectors()};
    for (Eigen::Index m = 0; m < s.vectors.cols(); ++m) {
        Eigen::Index i = 0;
        s.vectors.col(m).cwiseAbs().maxCoeff(&i);
        if (s.vectors(i, m) < 0) s.vectors.col(m) = -s.vectors.col(m);
    }
    return s;
}

EigenGroup eigenpair_group(const FockSpectrum& spec, int n, double cluster_tol, double ambiguity_factor) {
    const int D = static_cast<int>(spec.values.size());
    if (n < 1 || n > D) throw ConfigError("level index out of range");
    auto scale = [&](int i) { return std::max(1.0, std::abs(spec.values[i])); };
    int lo = n - 1, hi = n - 1;
    while (lo > 0 && spec.values[lo] - spec.values[lo - 1] <= cluster_tol * scale(lo)) --lo;
    while (hi + 1 < D && spec.values[hi + 1] - spec.values[hi] <= cluster_tol * scale(hi)) ++hi;
    const double band = ambiguity_factor * cluster_tol;
    if ((lo > 0 && spec.values[lo] - spec.values[lo - 1] <= band * scale(lo)) ||
        (hi + 1 < D && spec.values[hi + 1] - spec.values[hi] <= band * scale(hi)))
        throw NumericalError("eigenvalue cluster boundary ambiguous near level " + std::to_string(n));
    EigenGroup g;
    g.first = lo;
    g.d = hi - lo + 1;
    g.energy = spec.values.segment(lo, g.d).mean();
    g.gamma = spec.vectors.middleCols(lo, g.d);
    // Re-orthonormalize (modified Gram-Schmidt) to pin the basis down exactly.
    for (int a = 0; a < g.d; ++a) {
        for (int b = 0; b < a; ++b) g.gamma.col(a) -= g.gamma.col(b).dot(g.gamma.col(a)) * g.gamma.col(b);
        g.gamma.col(a).normalize();
    }
    return g;
}

FockResolvent fock_reduced_resolvent(const FockSpectrum& spec, const EigenGroup& group) {
    const Eigen::Index D = spec.values.size();
    Eigen::VectorXd d(D);
    for (Eigen::Index m = 0; m < D; ++m) {
        const bool inside = m >= group.first && m < group.first + group.d;
        d[m] = inside ? 0.0 : -1.0 / (spec.values[m] - group.energy);
    }
    FockResolvent r;
    r.matrix = spec.vectors * d.asDiagonal() * spec.vectors.transpose();
    r.matrix = 0.5 * (r.matrix + r.matrix.transpose()).eval();
    return r;
}

Eigen::MatrixXd passive_rotation(const FockSpace& fock, const Eigen::MatrixXd& O) {
    const int D = fock.dim();
    std::vector<SparseMatrix> cre;
    for (int k = 0; k < fock.M; ++k) cre.push_back(creation(fock, O.col(k)));
    Eigen::MatrixXd out(D, D);
    for (int s = 0; s < D; ++s) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(D, 0);
        for (int k = 0; k < fock.M; ++k) {
            const int n = fock.states[s][k];
            for (int i = 1; i <= n; ++i) v = (cre[k] * v) / std::sqrt(double(i));
        }
        out.col(s) = v;
    }
    return out;
}

BogoliubovUnitary bogoliubov_unitary(const FockSpace& fock, const HessianModel& hm, double leakage_threshold) {
    const int D = fock.dim();
    const BogoliubovKernel bk = bogoliubov_kernel(hm);
    Eigen::MatrixXd O = hm.modes;
    if (O.determinant() < 0) O.col(0) = -O.col(0);

    // Each single-mode squeezer is block diagonal over the occupations of
    // the other modes; exponentiate the small blocks.
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(D, D);
    for (int k = 0; k < fock.M; ++k) {
        const double r = bk.squeeze[k];
        if (r == 0.0) continue;
        const SparseMatrix low = mode_pair_lowering(fock, k);
        const Eigen::MatrixXd gen = 0.5 * r * (Eigen::MatrixXd(low) - Eigen::MatrixXd(low.transpose()));
        Eigen::MatrixXd Sk = Eigen::MatrixXd::Zero(D, D);
        std::vector<bool> done(D, false);
        for (int s = 0; s < D; ++s) {
            if (done[s]) continue;
            std::vector<int> block;
            auto occ = fock.states[s];
            for (int n = 0;; ++n) {
                occ[k] = n;
                const int idx = fock.find(occ);
                if (idx < 0) break;
                block.push_back(idx);
                done[idx] = true;
            }
            const int b = static_cast<int>(block.size());
            Eigen::MatrixXd g(b, b);
            for (int p = 0; p < b; ++p)
                for (int q = 0; q < b; ++q) g(p, q) = gen(block[p], block[q]);
            const Eigen::MatrixXd e = g.exp();
            for (int p = 0; p < b; ++p)
                for (int q = 0; q < b; ++q) Sk(block[p], block[q]) = e(p, q);
        }
        S = Sk * S;
    }
    const Eigen::MatrixXd Rot = passive_rotation(fock, O);
    BogoliubovUnitary out;
    out.U = Rot * S * Rot.transpose();
    const auto interior = states_up_to(fock, fock.n_max - 2);
    const Eigen::MatrixXd defect = Eigen::MatrixXd::Identity(D, D) - out.U * out.U.transpose();
    out.leakage = max_abs_on(defect, interior, interior);
    if (out.leakage > leakage_threshold)
        throw NumericalError("Bogoliubov unitary leakage " + std::to_string(out.leakage) + " above threshold");
    return out;
}

std::vector<int> states_up_to(const FockSpace& fock, int cap) {
    std::vector<int> out;
    for (int s = 0; s < fock.dim(); ++s)
        if (fock.total[s] <= cap) out.push_back(s);
    return out;
}

double max_abs_on(const Eigen::MatrixXd& A, const std::vector<int>& rows, const std::vector<int>& cols) {
    double m = 0.0;
    for (int c : cols)
        for (int r : rows) m = std::max(m, std::abs(A(r, c)));
    return m;
}

}  // namespace polaron
