#include "polaron/basis.hpp"

#include "polaron/errors.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace polaron {
namespace {

constexpr int panel_order = 20;
constexpr double pi = boost::math::constants::pi<double>();

// Gauss-Legendre rule of panel_order points on [-1, 1], ascending.
std::pair<std::vector<double>, std::vector<double>> reference_rule() {
    using rule = boost::math::quadrature::gauss<double, panel_order>;
    const auto& a = rule::abscissa();
    const auto& w = rule::weights();
    std::vector<double> x, wt;
    for (std::size_t i = a.size(); i-- > 0;) {
        x.push_back(-a[i]);
        wt.push_back(w[i]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        x.push_back(a[i]);
        wt.push_back(w[i]);
    }
    return {x, wt};
}

// d/dr of sin(k r)/r, with a series branch where the closed form cancels.
double radial_slope(double k, double r) {
    const double z = k * r;
    if (z < 0.05) {
        const double z2 = z * z;
        return k * k * z * (-1.0 / 3.0 + z2 * (1.0 / 30.0 - z2 / 840.0));
    }
    return (z * std::cos(z) - std::sin(z)) / (r * r);
}

// d2/dr2 of sin(k r)/r.
double radial_curvature(double k, double r) {
    const double z = k * r;
    if (z < 0.05) {
        const double z2 = z * z;
        return k * k * k * (-1.0 / 3.0 + z2 * (1.0 / 10.0 - z2 / 168.0));
    }
    const double s = std::sin(z), c = std::cos(z);
    return (-z * z * s - 2.0 * z * c + 2.0 * s) / (r * r * r);
}

}  // namespace

std::string to_string(DomainKind k) {
    return k == DomainKind::interval ? "interval" : "ball_radial";
}

DomainKind domain_kind_from_string(const std::string& s) {
    if (s == "interval") return DomainKind::interval;
    if (s == "ball_radial" || s == "ball") return DomainKind::ball_radial;
    throw ConfigError("unsupported domain kind '" + s + "'");
}

void validate(const DomainSpec& spec) {
    if (spec.K < 1 || spec.M < 1) throw ConfigError("K and M must be at least 1");
    if (spec.M > spec.K) throw ConfigError("M must not exceed K");
    if (!(spec.extent > 0.0) || !std::isfinite(spec.extent)) throw ConfigError("extent must be positive");
    if (spec.quadrature_points < 4 * std::max(spec.K, spec.M))
        throw ConfigError("quadrature_points must be at least 4*max(K, M)");
}

Basis build_basis(const DomainSpec& spec) {
    validate(spec);
    Basis b;
    b.spec = spec;
    const int K = spec.K;
    const double L = spec.extent;

    const auto [rx, rw] = reference_rule();
    const int panels = (spec.quadrature_points + panel_order - 1) / panel_order;
    const int nq = panels * panel_order;
    b.nodes.resize(nq);
    b.weights.resize(nq);
    const double h = L / panels;
    for (int p = 0; p < panels; ++p) {
        for (int i = 0; i < panel_order; ++i) {
            const int q = p * panel_order + i;
            b.nodes[q] = h * (p + 0.5 * (rx[i] + 1.0));
            b.weights[q] = 0.5 * h * rw[i];
        }
    }

    b.lambda.resize(K);
    b.values.resize(nq, K);
    b.slopes.resize(nq, K);
    for (int j = 0; j < K; ++j) {
        const double k = (j + 1) * pi / L;
        b.lambda[j] = k * k;
    }
    if (spec.kind == DomainKind::interval) {
        const double norm = std::sqrt(2.0 / L);
        for (int j = 0; j < K; ++j) {
            const double k = (j + 1) * pi / L;
            for (int q = 0; q < nq; ++q) {
                b.values(q, j) = norm * std::sin(k * b.nodes[q]);
                b.slopes(q, j) = norm * k * std::cos(k * b.nodes[q]);
            }
        }
    } else {
        const double norm = 1.0 / std::sqrt(2.0 * pi * L);
        for (int q = 0; q < nq; ++q) b.weights[q] *= 4.0 * pi * b.nodes[q] * b.nodes[q];
        for (int j = 0; j < K; ++j) {
            const double k = (j + 1) * pi / L;
            for (int q = 0; q < nq; ++q) {
                const double r = b.nodes[q];
                b.values(q, j) = norm * std::sin(k * r) / r;
                b.slopes(q, j) = norm * radial_slope(k, r);
            }
        }
    }

    const Eigen::MatrixXd gram = b.values.transpose() * b.weights.asDiagonal() * b.values;
    b.orthonormality_error = (gram - Eigen::MatrixXd::Identity(K, K)).cwiseAbs().maxCoeff();
    if (b.orthonormality_error > 1e-12)
        throw NumericalError("quadrature underresolved: orthonormality error " +
                             std::to_string(b.orthonormality_error));
    return b;
}

Eigen::VectorXd laplacian_power(const Basis& basis, double s) {
    if (s == 0.0) return Eigen::VectorXd::Ones(basis.K());
    return basis.lambda.array().pow(s).matrix();
}

double triple_overlap(const Basis& basis, int j, int m, int n) {
    std::array<int, 3> idx{j, m, n};
    std::sort(idx.begin(), idx.end());
    const auto& v = basis.values;
    double s = 0.0;
    for (Eigen::Index q = 0; q < v.rows(); ++q)
        s += basis.weights[q] * v(q, idx[0]) * v(q, idx[1]) * v(q, idx[2]);
    return s;
}

std::vector<Eigen::MatrixXd> multiplication_matrices(const Basis& basis, int count) {
    const int K = basis.K();
    std::vector<Eigen::MatrixXd> out(count, Eigen::MatrixXd(K, K));
    for (int j = 0; j < count; ++j)
        for (int m = 0; m < K; ++m)
            for (int n = m; n < K; ++n) {
                const double t = triple_overlap(basis, j, m, n);
                out[j](m, n) = t;
                out[j](n, m) = t;
            }
    return out;
}

std::vector<Eigen::MatrixXd> coupling_matrices(const Basis& basis) {
    auto mats = multiplication_matrices(basis, basis.M());
    for (int j = 0; j < basis.M(); ++j) mats[j] /= std::sqrt(basis.lambda[j]);
    return mats;
}

std::vector<Eigen::MatrixXd> gradient_coupling_matrices(const Basis& basis, int count) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(count);
    for (int j = 0; j < count; ++j) {
        const Eigen::VectorXd wq = basis.weights.cwiseProduct(basis.slopes.col(j));
        out.push_back(basis.values.transpose() * wq.asDiagonal() * basis.slopes);
    }
    return out;
}

Eigen::MatrixXd negative_laplacian_values(const Basis& basis) {
    const int K = basis.K();
    const Eigen::Index nq = basis.nodes.size();
    const double L = basis.spec.extent;
    Eigen::MatrixXd out(nq, K);
    if (basis.spec.kind == DomainKind::interval) {
        const double norm = std::sqrt(2.0 / L);
        for (int j = 0; j < K; ++j) {
            const double k = (j + 1) * pi / L;
            for (Eigen::Index q = 0; q < nq; ++q) out(q, j) = norm * k * k * std::sin(k * basis.nodes[q]);
        }
    } else {
        const double norm = 1.0 / std::sqrt(2.0 * pi * L);
        for (int j = 0; j < K; ++j) {
            const double k = (j + 1) * pi / L;
            for (Eigen::Index q = 0; q < nq; ++q) {
                const double r = basis.nodes[q];
                out(q, j) = -norm * (radial_curvature(k, r) + 2.0 * radial_slope(k, r) / r);
            }
        }
    }
    return out;
}

std::vector<int> uv_projection(const Basis& basis, double cutoff) {
    std::vector<int> out;
    if (cutoff < 0.0) throw ConfigError("cutoff must be nonnegative");
    const double c2 = std::isinf(cutoff) ? cutoff : cutoff * cutoff;
    for (int j = 0; j < basis.K(); ++j)
        if (basis.lambda[j] <= c2) out.push_back(j);
    return out;
}

}  // namespace polaron
