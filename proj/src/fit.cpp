#include "polaron/fit.hpp"

#include "polaron/errors.hpp"

#include <cmath>

namespace polaron {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double xmin, double xmax,
                     double floor) {
    if (x.size() != y.size()) throw ConfigError("fit inputs differ in length");
    LogLogFit f;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= xmin && x[i] <= xmax) || std::isinf(x[i])) continue;
        const double v = std::abs(y[i]);
        if (!(v >= floor)) continue;
        f.x.push_back(x[i]);
        f.y.push_back(v);
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(v));
    }
    const std::size_t n = lx.size();
    if (n < 3) {
        f.below_floor = true;
        return f;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (f.intercept + f.slope * lx[i]);
        f.residuals.push_back(r);
        sse += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return f;
}

namespace {

OrderFit finish(OrderFit o, double amin, double amax, double floor) {
    o.fit = fit_loglog(o.alphas, o.values, amin, amax, floor);
    if (o.fit.below_floor) {
        o.pass = true;
        return o;
    }
    // drop the largest alpha inside the window and refit
    std::vector<double> a, v;
    double top = 0.0;
    for (double x : o.fit.x) top = std::max(top, x);
    for (std::size_t i = 0; i < o.alphas.size(); ++i)
        if (o.alphas[i] != top) {
            a.push_back(o.alphas[i]);
            v.push_back(o.values[i]);
        }
    const LogLogFit g = fit_loglog(a, v, amin, amax, floor);
    o.stability = g.below_floor ? 0.0 : std::abs(g.slope - o.fit.slope);
    o.pass = o.fit.slope <= o.expected + o.margin;
    return o;
}

}  // namespace

std::vector<double> remainder_series(const SpectralSweep& sw, int level, const std::vector<double>& E, int b) {
    if (level < 1 || level > sw.levels) throw ConfigError("level outside the sweep");
    if (static_cast<int>(E.size()) < b + 1) throw ConfigError("not enough coefficients for the requested order");
    std::vector<double> r;
    for (std::size_t i = 0; i < sw.alphas.size(); ++i) {
        const double a = sw.alphas[i];
        double v = (sw.base(i, level - 1) - E[0]) + sw.shift(i, level - 1);
        for (int l = 1; l <= b; ++l) v -= std::pow(a, -l) * E[l];
        r.push_back(v);
    }
    return r;
}

OrderFit coefficient_order_fit(const SpectralSweep& sw, int level, const std::vector<double>& E, int b,
                               double amin, double amax, double margin, double floor) {
    OrderFit o;
    o.level = level;
    o.b = b;
    o.expected = -(b + 1.0);
    o.margin = margin;
    o.alphas = sw.alphas;
    o.values = remainder_series(sw, level, E, b);
    return finish(std::move(o), amin, amax, floor);
}

OrderFit residual_order_fit(const std::vector<double>& alphas, const std::vector<double>& residuals, int b,
                            double amin, double amax, double margin, double floor) {
    OrderFit o;
    o.b = b;
    o.expected = -(b + 3.0);
    o.margin = margin;
    o.alphas = alphas;
    o.values = residuals;
    return finish(std::move(o), amin, amax, floor);
}

GrowthReport growth_check(const std::vector<double>& E) {
    GrowthReport g;
    double lf = 0.0;  // log l!
    for (std::size_t l = 1; l < E.size(); ++l) {
        lf += std::log(static_cast<double>(l));
        const double v = std::abs(E[l]);
        const double c = v > 0.0 ? std::exp((std::log(v) - 0.5 * lf) / static_cast<double>(l)) : 0.0;
        g.per_order.push_back(c);
        g.c_hat = std::max(g.c_hat, c);
    }
    return g;
}

}  // namespace polaron
