#include "polaron/pipeline.hpp"

#include "polaron/errors.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

namespace polaron {

Prepared prepare(const RunConfig& cfg, bool with_fock) {
    validate(cfg);
    Prepared p{cfg, build_basis(cfg.domain), {}, {}, nullptr};
    PekarOptions po;
    po.tol = cfg.tol.pekar;
    p.sol = solve_pekar(electron_model(p.basis, cfg.coupling_scale), po);
    p.hessian = hessian_matrix(p.sol);
    if (with_fock) p.model = make_fluctuation_model(p.sol, cfg.n_max, cfg.max_fock_dim);
    return p;
}

std::vector<int> resolve_levels(const RunConfig& cfg, const HessianModel& hm, int fock_dim) {
    std::vector<int> out;
    if (!cfg.energy_window) {
        out = cfg.levels;
    } else {
        const auto [lo, hi] = *cfg.energy_window;
        int count = 8;
        std::vector<LadderLevel> lad;
        for (;;) {
            lad = ladder_spectrum(hm, count);
            if (lad.back().energy > hi || count >= fock_dim) break;
            count *= 2;
        }
        for (const auto& l : lad)
            if (l.energy >= lo && l.energy <= hi) out.push_back(l.index);
        if (out.empty()) throw ConfigError("no ladder level inside levels.energy_window");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (int n : out)
        if (n > fock_dim) throw ConfigError("requested level exceeds the Fock dimension");
    return out;
}

std::vector<SeriesResult> level_series(const std::shared_ptr<const FluctuationModel>& model, int n, int b,
                                       const Tolerances& tol) {
    const SeriesContext ctx = make_series_context(model, n, tol.cluster);
    if (ctx.d() == 1) return {coefficients_nondegenerate(ctx, b, tol.odd)};
    std::vector<SeriesResult> out;
    for (int s = 1; s <= ctx.d(); ++s) out.push_back(coefficients_degenerate(ctx, s, b));
    return out;
}

OracleOptions oracle_options(const RunConfig& cfg) {
    OracleOptions o;
    o.pcg_tol = cfg.tol.pcg;
    o.cluster_tol = cfg.tol.cluster;
    return o;
}

CsvTable sweep_table(const SpectralSweep& sw) {
    CsvTable t({"alpha", "level", "eigenvalue", "base", "shift"});
    for (std::size_t i = 0; i < sw.alphas.size(); ++i)
        for (int n = 0; n < sw.levels; ++n)
            t.add({format_real(sw.alphas[i]), std::to_string(n + 1), format_real(sw.eigenvalues(i, n)),
                   format_real(sw.base(i, n)), format_real(sw.shift(i, n))});
    return t;
}

SpectralSweep read_sweep_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path.string());
    std::string line;
    std::getline(f, line);  // stamp
    std::getline(f, line);
    if (line != "alpha,level,eigenvalue,base,shift") throw ConfigError("unexpected sweep header in " + path.string());
    std::map<double, std::map<int, std::array<double, 3>>> rows;
    int levels = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cell;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cell.push_back(c);
        if (cell.size() != 5) throw ConfigError("malformed sweep row in " + path.string());
        try {
            const int n = std::stoi(cell[1]);
            rows[std::stod(cell[0])][n] = {std::stod(cell[2]), std::stod(cell[3]), std::stod(cell[4])};
            levels = std::max(levels, n);
        } catch (const std::exception&) {
            throw ConfigError("malformed number in " + path.string());
        }
    }
    SpectralSweep sw;
    sw.levels = levels;
    const int na = static_cast<int>(rows.size());
    sw.eigenvalues.resize(na, levels);
    sw.base.resize(na, levels);
    sw.shift.resize(na, levels);
    int i = 0;
    for (const auto& [a, per] : rows) {
        if (static_cast<int>(per.size()) != levels) throw ConfigError("sweep rows are incomplete in " + path.string());
        sw.alphas.push_back(a);
        for (const auto& [n, v] : per) {
            sw.eigenvalues(i, n - 1) = v[0];
            sw.base(i, n - 1) = v[1];
            sw.shift(i, n - 1) = v[2];
        }
        ++i;
    }
    return sw;
}

std::optional<SpectralSweep> cached_sweep(const RunConfig& cfg) {
    const auto path = output_directory(cfg) / sweep_file;
    if (!std::filesystem::exists(path)) return std::nullopt;
    const auto stamp = read_stamp(path);
    if (stamp.size() < 3 || stamp[0] != artifact_version || stamp[1] != config_hash(cfg) || stamp[2] != "sweep")
        return std::nullopt;
    return read_sweep_csv(path);
}

}  // namespace polaron
