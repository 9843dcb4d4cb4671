#include "polaron/product_space.hpp"

#include "polaron/kernels.hpp"

#include <algorithm>

namespace polaron {
namespace {

Eigen::Map<const Eigen::MatrixXd> electron_view(const ProductSpace& ps, const Block& b) {
    return {b.data(), ps.K, b.size() / ps.K};
}

Eigen::Map<Eigen::MatrixXd> electron_view(const ProductSpace& ps, Block& b) {
    return {b.data(), ps.K, b.size() / ps.K};
}

Eigen::VectorXd tiled(const Eigen::VectorXd& v, int times) {
    return v.replicate(times, 1);
}

Block scale_rows(const ProductSpace& ps, const Eigen::VectorXd& d, const Block& in) {
    Block out(in.rows(), in.cols());
    const Eigen::VectorXd t = tiled(d, ps.ncols(in));
    const std::size_t n = static_cast<std::size_t>(in.rows());
    for (Eigen::Index f = 0; f < in.cols(); ++f) kernels::hadamard(n, t.data(), in.col(f).data(), out.col(f).data());
    return out;
}

// sum_j A_j (x) X_j, built one target Fock column at a time so the
// neighbouring source columns stay in cache.
Block apply_field(const ProductSpace& ps, const std::vector<Eigen::MatrixXd>& A, const Block& in) {
    const Eigen::Index nc = in.rows() / ps.K;
    const std::size_t n = static_cast<std::size_t>(in.rows());
    Block out(in.rows(), in.cols());
    std::vector<Eigen::MatrixXd> per(A.size(), Eigen::MatrixXd(ps.K, nc));
    std::vector<char> used(A.size());
    for (int f = 0; f < ps.dim(); ++f) {
        std::fill(used.begin(), used.end(), 0);
        for (const Incoming& e : ps.incoming[f]) {
            Eigen::MatrixXd& acc = per[e.mode];
            if (!used[e.mode]) {
                acc.setZero();
                used[e.mode] = 1;
            }
            kernels::axpy(n, e.amp, in.col(e.source).data(), acc.data());
        }
        Eigen::Map<Eigen::MatrixXd> o(out.col(f).data(), ps.K, nc);
        o.setZero();
        for (std::size_t j = 0; j < A.size(); ++j)
            if (used[j]) o.noalias() += A[j] * per[j];
    }
    return out;
}

}  // namespace

ProductSpace make_product_space(const PekarSolution& sol, std::shared_ptr<const FockSpace> fock) {
    ProductSpace ps;
    ps.K = static_cast<int>(sol.c.size());
    ps.fock = fock;
    ps.eps = sol.h0_values;
    ps.resolvent_diag = Eigen::VectorXd::Zero(ps.K);
    for (int m = 1; m < ps.K; ++m) ps.resolvent_diag[m] = -1.0 / ps.eps[m];
    const Eigen::MatrixXd& U = sol.h0_vectors;
    for (int j = 0; j < sol.model.M(); ++j) {
        Eigen::MatrixXd b = U.transpose() * sol.model.B[j] * U;
        b = 0.5 * (b + b.transpose()).eval();
        ps.bare.push_back(b);
        // The classical shift is taken from this same matrix so that the
        // psi^P diagonal entry of the field factor is exactly zero.
        Eigen::MatrixXd f = b;
        f.diagonal().array() -= b(0, 0);
        f(0, 0) = 0.0;
        ps.field.push_back(f);
    }
    ps.number = number_diagonal(*ps.fock);
    ps.incoming.resize(ps.fock->dim());
    for (int j = 0; j < ps.fock->M; ++j)
        for (const Hop& h : ps.fock->hops[j]) {
            ps.incoming[h.to].push_back({j, h.from, h.amp});
            ps.incoming[h.from].push_back({j, h.to, h.amp});
        }
    return ps;
}

Block embed(const ProductSpace& ps, const Eigen::MatrixXd& X) {
    Block Y = ps.zeros(static_cast<int>(X.cols()));
    for (Eigen::Index c = 0; c < X.cols(); ++c) Y.row(ps.K * c) = X.col(c).transpose();
    return Y;
}

Eigen::MatrixXd project(const ProductSpace& ps, const Block& Y) {
    const int nc = ps.ncols(Y);
    Eigen::MatrixXd X(ps.dim(), nc);
    for (int c = 0; c < nc; ++c) X.col(c) = Y.row(ps.K * c).transpose();
    return X;
}

void remove_ground(const ProductSpace& ps, Block& Y) {
    for (int c = 0; c < ps.ncols(Y); ++c) Y.row(ps.K * c).setZero();
}

void add_electron(const ProductSpace& ps, const Eigen::MatrixXd& A, const Block& in, Block& out, double scale) {
    auto o = electron_view(ps, out);
    o.noalias() += scale * A * electron_view(ps, in);
}

void add_mode(const ProductSpace& ps, int j, int sign, const Block& in, Block& out, double scale) {
    const std::size_t n = static_cast<std::size_t>(in.rows());
    const double s2 = sign * scale;
    for (const Hop& h : ps.fock->hops[j]) {
        kernels::axpy(n, scale * h.amp, in.col(h.from).data(), out.col(h.to).data());
        kernels::axpy(n, s2 * h.amp, in.col(h.to).data(), out.col(h.from).data());
    }
}

Block apply_V1(const ProductSpace& ps, const Block& in) { return apply_field(ps, ps.field, in); }

Block apply_bare_field(const ProductSpace& ps, const Block& in) { return apply_field(ps, ps.bare, in); }

Block apply_R(const ProductSpace& ps, const Block& in) { return scale_rows(ps, ps.resolvent_diag, in); }

Block apply_H0(const ProductSpace& ps, const Block& in) { return scale_rows(ps, ps.eps, in); }

Block apply_number(const ProductSpace& ps, const Block& in) {
    Block out(in.rows(), in.cols());
    for (Eigen::Index f = 0; f < in.cols(); ++f) out.col(f) = ps.number[f] * in.col(f);
    return out;
}

Eigen::VectorXd gather(const ProductSpace& ps, const Block& Y, int c) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(ps.K) * Y.cols());
    for (Eigen::Index f = 0; f < Y.cols(); ++f) v.segment(ps.K * f, ps.K) = Y.col(f).segment(ps.K * c, ps.K);
    return v;
}

Eigen::VectorXd column_dots(const ProductSpace& ps, const Block& A, const Block& B) {
    const int nc = ps.ncols(A);
    Eigen::VectorXd out(nc);
    for (int c = 0; c < nc; ++c) {
        const Eigen::VectorXd a = gather(ps, A, c), b = gather(ps, B, c);
        out[c] = kernels::dot2(static_cast<std::size_t>(a.size()), a.data(), b.data());
    }
    return out;
}

Eigen::MatrixXd block_gram(const ProductSpace& ps, const Block& A, const Block& B) {
    const int na = ps.ncols(A), nb = ps.ncols(B);
    std::vector<Eigen::VectorXd> ga, gb;
    for (int a = 0; a < na; ++a) ga.push_back(gather(ps, A, a));
    for (int b = 0; b < nb; ++b) gb.push_back(gather(ps, B, b));
    Eigen::MatrixXd G(na, nb);
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
            G(a, b) = kernels::dot2(static_cast<std::size_t>(ga[a].size()), ga[a].data(), gb[b].data());
    return G;
}

}  // namespace polaron
