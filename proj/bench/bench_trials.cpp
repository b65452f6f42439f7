// Compares the serial reference trial loop against the OpenMP one on the same
// experiment and verifies the reports agree.

#include <chrono>
#include <cstdio>

#include "fec/sim.hpp"

namespace {

fec::ExperimentConfig base_config() {
    fec::ExperimentConfig cfg;
    cfg.scheme = fec::Scheme::RaptorOnly;
    cfg.raptor_k = 128;
    cfg.raptor_n = 140;
    cfg.symbol_bytes = 1;
    cfg.inject_erasures = true;
    cfg.grid = {6, 8, 10};
    cfg.max_trials = 4000;
    cfg.min_failures = 1'000'000;  // run every trial
    cfg.master_seed = 7;
    cfg.analytic = false;
    return cfg;
}

double timed_run(fec::ExperimentConfig cfg, size_t workers, fec::SimReport& out) {
    cfg.workers = workers;
    auto t0 = std::chrono::steady_clock::now();
    out = fec::run_experiment(cfg);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    fec::ExperimentConfig cfg = base_config();
    fec::SimReport serial, parallel;
    double ts = timed_run(cfg, 1, serial);
    double tp = timed_run(cfg, 8, parallel);

    bool same = serial.points.size() == parallel.points.size();
    for (size_t i = 0; same && i < serial.points.size(); ++i) {
        const auto &a = serial.points[i], &b = parallel.points[i];
        same = a.trials == b.trials && a.e2e_failures == b.e2e_failures &&
               a.inner_failures == b.inner_failures && a.miss_corrections == b.miss_corrections;
    }
    std::printf("serial:   %.3f s\n", ts);
    std::printf("openmp:   %.3f s (8 workers requested)\n", tp);
    std::printf("speedup:  %.2fx\n", ts / tp);
    std::printf("reports identical: %s\n", same ? "yes" : "NO");
    return same ? 0 : 1;
}
