// Acceptance run on the default configuration (or the TOML file given as
// the first argument). One PASS/FAIL line per criterion; exit 1 on any FAIL.
#include "polaron/acceptance.hpp"
#include "polaron/config.hpp"
#include "polaron/report.hpp"

#include <cstdio>
#include <exception>

int main(int argc, char** argv) {
    using namespace polaron;
    try {
        const RunConfig cfg = argc > 1 ? load_config(argv[1]) : RunConfig{};
        validate(cfg);
        AcceptanceOptions opts;
        opts.on_result = [](const CriterionResult& r) {
            std::printf("%s\n", format_line(r).c_str());
            std::fflush(stdout);
        };
        const auto results = run_acceptance(cfg, opts);
        int failed = 0;
        for (const auto& r : results) failed += r.pass ? 0 : 1;
        if (const char* dir = std::getenv(output_root_env); dir && *dir)
            write_json(std::filesystem::path(dir) / "acceptance.json", {config_hash(cfg), "acceptance"},
                       to_json(results));
        std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
        return failed ? 1 : 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 1;
    }
}
