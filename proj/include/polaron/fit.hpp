#pragma once

#include "polaron/oracle.hpp"

#include <limits>
#include <vector>

namespace polaron {

struct LogLogFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> x, y;          // points used (positive, above the floor)
    std::vector<double> residuals;     // log y - fitted
    bool below_floor = false;          // too few points above the floor to fit
};

// OLS of log|y| on log x over xmin <= x <= xmax; |y| < floor points are dropped.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double xmin, double xmax,
                     double floor = 1e-13);

struct OrderFit {
    int level = 1;                  // 1-based
    int b = 0;
    double expected = 0.0;          // target slope
    double margin = 0.3;
    LogLogFit fit;
    std::vector<double> alphas;
    std::vector<double> values;     // r_b or residual per alpha
    double stability = 0.0;         // slope change after dropping the largest alpha
    bool pass = false;
};

// r_b(alpha) = alpha^2 E~^(n)(alpha) - sum_{l<=b} alpha^{-l} E_l, fit over [amin, amax].
std::vector<double> remainder_series(const SpectralSweep& sw, int level, const std::vector<double>& E, int b);
OrderFit coefficient_order_fit(const SpectralSweep& sw, int level, const std::vector<double>& E, int b,
                               double amin = 60.0, double amax = 200.0, double margin = 0.3,
                            double floor = 1e-13);

OrderFit residual_order_fit(const std::vector<double>& alphas, const std::vector<double>& residuals, int b,
                            double amin = 60.0, double amax = 200.0, double margin = 0.3,
                            double floor = 1e-13);

struct GrowthReport {
    double c_hat = 0.0;              // smallest C with |E_l| <= C^l sqrt(l!) for l >= 1
    std::vector<double> per_order;   // (|E_l| / sqrt(l!))^{1/l}
};

GrowthReport growth_check(const std::vector<double>& E);

}  // namespace polaron
