#include "polaron/quadratic_model.hpp"

#include "polaron/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>
#include <string>

namespace polaron {

HessianModel hessian_from_h(const Eigen::MatrixXd& h) {
    HessianModel hm;
    const Eigen::Index M = h.rows();
    hm.h = 0.5 * (h + h.transpose());
    hm.G = 0.25 * (hm.h - Eigen::MatrixXd::Identity(M, M));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm.h);
    hm.tau = es.eigenvalues();
    hm.modes = es.eigenvectors();
    for (Eigen::Index k = 0; k < M; ++k) {
        if (!(hm.tau[k] > 0.0))
            throw NumericalError("Hessian eigenvalue tau_" + std::to_string(k + 1) + " = " +
                                 std::to_string(hm.tau[k]) + " is not positive");
        if (hm.tau[k] > 1.0 + 1e-10)
            throw NumericalError("Hessian eigenvalue tau_" + std::to_string(k + 1) + " exceeds 1");
    }
    hm.kernel = bogoliubov_kernel(hm).kernel;
    return hm;
}

HessianModel hessian_matrix(const PekarSolution& sol) {
    const int M = sol.model.M();
    Eigen::MatrixXd Bc(sol.c.size(), M);
    for (int j = 0; j < M; ++j) Bc.col(j) = sol.model.B[j] * sol.c;
    const Eigen::MatrixXd RBc = reduced_resolvent_matrix(sol) * Bc;
    Eigen::MatrixXd G = Bc.transpose() * RBc;
    G = 0.5 * (G + G.transpose());
    HessianModel hm = hessian_from_h(Eigen::MatrixXd::Identity(M, M) + 4.0 * G);
    hm.G = G;
    return hm;
}

double ground_energy(const HessianModel& hm) {
    return 0.5 * (hm.tau.array().sqrt() - 1.0).sum();
}

std::vector<LadderLevel> ladder_spectrum(const HessianModel& hm, int count, bool only_below_continuum,
                                         double rel_tol) {
    const int M = static_cast<int>(hm.tau.size());
    const Eigen::VectorXd freq = hm.tau.array().sqrt();
    const double e1 = ground_energy(hm);

    struct Node {
        double energy;
        std::vector<int> occ;
        int last;  // successors only raise modes >= last, so each tuple appears once
        bool operator>(const Node& o) const {
            if (energy != o.energy) return energy > o.energy;
            return occ > o.occ;
        }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<>> heap;
    heap.push({e1, std::vector<int>(M, 0), 0});

    std::vector<LadderLevel> raw;
    auto same = [&](double a, double b) { return std::abs(a - b) <= rel_tol * std::max(1.0, std::abs(a)); };
    while (!heap.empty()) {
        Node top = heap.top();
        heap.pop();
        if (static_cast<int>(raw.size()) >= count && !same(top.energy, raw.back().energy)) break;
        raw.push_back({static_cast<int>(raw.size()) + 1, top.energy, top.occ, 1});
        for (int k = top.last; k < M; ++k) {
            Node nx{top.energy + freq[k], top.occ, k};
            ++nx.occ[k];
            heap.push(std::move(nx));
        }
    }
    for (std::size_t i = 0; i < raw.size();) {
        std::size_t j = i;
        while (j < raw.size() && same(raw[i].energy, raw[j].energy)) ++j;
        for (std::size_t k = i; k < j; ++k) raw[k].degeneracy = static_cast<int>(j - i);
        i = j;
    }
    raw.resize(std::min<std::size_t>(raw.size(), count));
    if (only_below_continuum)
        std::erase_if(raw, [&](const LadderLevel& l) { return l.energy >= e1 + 1.0; });
    return raw;
}

BogoliubovKernel bogoliubov_kernel(const HessianModel& hm) {
    BogoliubovKernel bk;
    const Eigen::Index M = hm.tau.size();
    Eigen::VectorXd beta(M), cosh_v(M);
    bk.squeeze.resize(M);
    for (Eigen::Index k = 0; k < M; ++k) {
        const double t = hm.tau[k];
        if (!(t > 0.0)) throw NumericalError("Bogoliubov kernel needs positive tau");
        const double q = std::pow(t, 0.25);
        beta[k] = 0.5 * (1.0 / q - q);
        cosh_v[k] = 0.5 * (1.0 / q + q);
        bk.squeeze[k] = -0.25 * std::log(t);
        const double gap = 1.0 - t;
        if (gap > 0.0) bk.domination_constant = std::max(bk.domination_constant, beta[k] * beta[k] / gap);
    }
    bk.kernel = hm.modes * beta.asDiagonal() * hm.modes.transpose();
    bk.cosh_part = hm.modes * cosh_v.asDiagonal() * hm.modes.transpose();
    bk.hs_norm = beta.norm();
    return bk;
}

void write_tau_csv(std::ostream& os, const HessianModel& hm) {
    os << "k,tau\n";
    char buf[64];
    for (Eigen::Index k = 0; k < hm.tau.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", hm.tau[k]);
        os << k + 1 << ',' << buf << '\n';
    }
}

void write_ladder_csv(std::ostream& os, const std::vector<LadderLevel>& levels) {
    os << "n,energy,occupation,degeneracy\n";
    char buf[64];
    for (const auto& l : levels) {
        std::snprintf(buf, sizeof buf, "%.17g", l.energy);
        os << l.index << ',' << buf << ',';
        for (std::size_t i = 0; i < l.occupation.size(); ++i) os << (i ? " " : "") << l.occupation[i];
        os << ',' << l.degeneracy << '\n';
    }
}

}  // namespace polaron
