#pragma once

#include "polaron/acceptance.hpp"
#include "polaron/series.hpp"

#include <memory>

namespace fixtures {

// K = 6, M = 3, N_max = 5 on (0, pi): dim 56, small enough for dense checks.
inline std::shared_ptr<const polaron::FluctuationModel> small_model() {
    static const auto m = [] {
        polaron::DomainSpec s;
        s.K = 6;
        s.M = 3;
        return polaron::make_fluctuation_model(polaron::solve_pekar(polaron::electron_model(polaron::build_basis(s))), 5);
    }();
    return m;
}

inline std::shared_ptr<const polaron::FluctuationModel> off_model() {
    static const auto m = [] {
        polaron::DomainSpec s;
        s.K = 6;
        s.M = 3;
        return polaron::make_fluctuation_model(
            polaron::solve_pekar(polaron::electron_model(polaron::build_basis(s), 0.0)), 4);
    }();
    return m;
}

// The engineered opposite-parity crossing (levels 3 and 4 merge).
struct Crossing {
    polaron::DegenerateSetup setup;
    std::shared_ptr<const polaron::FluctuationModel> model;
};

inline const Crossing& crossing() {
    static const Crossing c = [] {
        polaron::DomainSpec d;
        d.K = 10;
        d.M = 4;
        Crossing out;
        out.setup = polaron::engineer_crossing(d, 8, 12.0, 14.5);
        d.extent = out.setup.extent;
        out.model = polaron::make_fluctuation_model(polaron::solve_pekar(polaron::electron_model(polaron::build_basis(d))), 8);
        return out;
    }();
    return c;
}

}  // namespace fixtures
