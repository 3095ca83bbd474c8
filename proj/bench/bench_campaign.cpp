// Times the Monte Carlo sweep campaign: serial reference vs the OpenMP
// driver, same seed, checks the outputs agree sample by sample.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dwsim/montecarlo.hpp"

using namespace dwsim;

int main(int argc, char** argv) {
    int n_samples = 16;
    double duration = 0.020;  // shortened sweep keeps the benchmark snappy
    if (argc > 1) n_samples = std::atoi(argv[1]);
    if (argc > 2) duration = std::atof(argv[2]);

    const ElectrodeBasis basis = ElectrodeBasis::build_analytic(TrapGeometry{}, 200);
    const SweepStageParams par = default_sweep_stage(SpeciesLabel::proton);
    const DoubleWellSpec spec = sweep_spec_for(par, SpeciesLabel::proton);
    const SweepSchedule sched = build_sweep(spec, basis, par.f_hi, par.f_lo, duration, 32);

    CampaignConfig cfg;
    cfg.n_samples = n_samples;
    cfg.seed = 12345;
    cfg.n_sweeps = 1;

    using clock = std::chrono::steady_clock;
    std::printf("campaign benchmark: %d samples, %.0f ms sweep\n", n_samples, duration * 1e3);

    const auto t0 = clock::now();
    const EnergyDistribution serial = run_sweep_campaign_serial(sched, basis, cfg);
    const auto t1 = clock::now();
    const double t_serial = std::chrono::duration<double>(t1 - t0).count();
    std::printf("  serial reference : %8.2f s\n", t_serial);

    int max_threads = 1;
#ifdef _OPENMP
    max_threads = omp_get_max_threads();
#endif
    for (int threads = 1; threads <= max_threads; threads *= 2) {
        cfg.threads = threads;
        const auto t2 = clock::now();
        const EnergyDistribution par_dist = run_sweep_campaign(sched, basis, cfg);
        const auto t3 = clock::now();
        const double t_par = std::chrono::duration<double>(t3 - t2).count();
        bool same = par_dist.samples.size() == serial.samples.size();
        for (size_t i = 0; same && i < serial.samples.size(); ++i)
            same = par_dist.samples[i].E_fin_K == serial.samples[i].E_fin_K &&
                   par_dist.samples[i].outcome == serial.samples[i].outcome;
        std::printf("  omp %2d thread(s) : %8.2f s  speedup %.2fx  results %s\n", threads,
                    t_par, t_serial / t_par, same ? "identical" : "MISMATCH");
        if (!same) return 1;
    }
    return 0;
}
