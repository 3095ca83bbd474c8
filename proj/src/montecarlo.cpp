#include "dwsim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dwsim {

std::vector<double> sample_noise_coefficients(const ElectrodeBasis& basis,
                                              const VoltageNoise& noise, RngStream& rng,
                                              std::vector<double>* delta_voltages) {
    std::vector<double> dv(basis.n_electrodes());
    for (double& v : dv) v = rng.normal(noise.sigma_V);
    if (delta_voltages) *delta_voltages = dv;
    return basis.compose(dv).coefficients();
}

double EnergyDistribution::fraction_below(double threshold_K) const {
    int n = 0, total = 0;
    for (const SampleRecord& s : samples) {
        if (s.outcome == SampleOutcome::untrapped) continue;
        ++total;
        if (s.outcome == SampleOutcome::cooled && s.E_fin_K < threshold_K) ++n;
    }
    return total > 0 ? static_cast<double>(n) / total : 0.0;
}

EnergyDistribution aggregate_distribution(std::vector<SampleRecord> samples, int n_bins) {
    EnergyDistribution d;
    d.samples = std::move(samples);
    std::vector<double> cooled;
    for (const SampleRecord& s : d.samples) {
        switch (s.outcome) {
            case SampleOutcome::cooled:
                ++d.n_cooled;
                cooled.push_back(s.E_fin_K);
                break;
            case SampleOutcome::untrapped: ++d.n_untrapped; break;
            case SampleOutcome::collided: ++d.n_collided; break;
        }
    }
    if (cooled.empty()) return d;
    std::sort(cooled.begin(), cooled.end());
    double mean = 0.0;
    for (double e : cooled) mean += e;
    d.mean_energy_K = mean / cooled.size();

    // histogram normalized to unit area
    const double hi = cooled.back() * 1.0000001 + 1e-12;
    const double w = hi / n_bins;
    d.bin_edges_K.resize(n_bins + 1);
    d.density.assign(n_bins, 0.0);
    for (int i = 0; i <= n_bins; ++i) d.bin_edges_K[i] = i * w;
    for (double e : cooled) {
        int b = std::min(static_cast<int>(e / w), n_bins - 1);
        d.density[b] += 1.0;
    }
    for (double& v : d.density) v /= cooled.size() * w;

    // drop edge: largest relative gap between consecutive sorted energies in
    // the upper half of the cooled population
    double best = 1.0;
    d.drop_edge_K = cooled.back();
    for (size_t i = cooled.size() / 2; i + 1 < cooled.size(); ++i) {
        const double lo = std::max(cooled[i], 1e-9);
        const double gap = cooled[i + 1] / lo;
        if (gap > best) {
            best = gap;
            d.drop_edge_K = cooled[i];
        }
    }
    return d;
}

SampleRecord run_sweep_sample(const SweepSchedule& sched, const ElectrodeBasis& basis,
                              const CampaignConfig& cfg, double depth_K, int index) {
    SampleRecord rec;
    rec.index = index;
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(index));

    // fixed draw order: energy, noise, sides/phases
    const double e_init = cfg.sampler.sample(rng);
    rec.E_init_K = joules_to_kelvin(e_init);
    std::vector<double> noise_coeffs;
    if (cfg.apply_noise) noise_coeffs = sample_noise_coefficients(basis, cfg.noise, rng);
    SweepRunConfig run_cfg;
    run_cfg.integ = cfg.integ;
    run_cfg.n_sweeps = cfg.n_sweeps;
    run_cfg.coolant = cfg.coolant;
    run_cfg.phases.side_u = rng.uniform();
    run_cfg.phases.phase_u = rng.uniform();
    run_cfg.phases.be_phase_u = rng.uniform();
    run_cfg.be_phase_u2 = rng.uniform();

    if (rec.E_init_K >= depth_K) {
        rec.outcome = SampleOutcome::untrapped;
        rec.E_fin_K = rec.E_init_K;
        return rec;
    }
    const SweepResult r = run_sweep(sched, e_init, run_cfg,
                                    cfg.apply_noise ? &noise_coeffs : nullptr);
    rec.E_fin_K = joules_to_kelvin(r.E_fin);
    switch (r.outcome) {
        case RunOutcome::completed: rec.outcome = SampleOutcome::cooled; break;
        case RunOutcome::collision: rec.outcome = SampleOutcome::collided; break;
        case RunOutcome::escaped: rec.outcome = SampleOutcome::untrapped; break;
    }
    return rec;
}

namespace {

double sweep_well_depth_K(const SweepSchedule& sched) {
    const DoubleWellSpec& spec = sched.base_spec;
    const ComposedPotential& start = sched.potentials.front();
    const double dir = (spec.z_b0 > spec.z_a0) ? +1.0 : -1.0;
    const WellInfo w =
        characterize_well(start, spec.z_a0, spec.species_a.charge, spec.species_a.mass, dir);
    return w.depth_K;
}

}  // namespace

EnergyDistribution run_sweep_campaign(const SweepSchedule& sched, const ElectrodeBasis& basis,
                                      const CampaignConfig& cfg) {
    const double depth_K = sweep_well_depth_K(sched);
    std::vector<SampleRecord> recs(cfg.n_samples);
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.n_samples; ++i)
        recs[i] = run_sweep_sample(sched, basis, cfg, depth_K, i);
    return aggregate_distribution(std::move(recs), cfg.histogram_bins);
}

EnergyDistribution run_sweep_campaign_serial(const SweepSchedule& sched,
                                             const ElectrodeBasis& basis,
                                             const CampaignConfig& cfg) {
    const double depth_K = sweep_well_depth_K(sched);
    std::vector<SampleRecord> recs(cfg.n_samples);
    for (int i = 0; i < cfg.n_samples; ++i)
        recs[i] = run_sweep_sample(sched, basis, cfg, depth_K, i);
    return aggregate_distribution(std::move(recs), cfg.histogram_bins);
}

EnergyDistribution run_harmonic_campaign(const ComposedPotential& pot, const DoubleWellSpec& spec,
                                         const ElectrodeBasis& basis, const CampaignConfig& cfg,
                                         double duration_factor) {
    const double dir = (spec.z_b0 > spec.z_a0) ? +1.0 : -1.0;
    const WellInfo well =
        characterize_well(pot, spec.z_a0, spec.species_a.charge, spec.species_a.mass, dir);
    std::vector<SampleRecord> recs(cfg.n_samples);
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.n_samples; ++i) {
        SampleRecord rec;
        rec.index = i;
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(i));
        const double e_init = cfg.sampler.sample(rng);
        rec.E_init_K = joules_to_kelvin(e_init);
        std::vector<double> noise_coeffs;
        if (cfg.apply_noise) noise_coeffs = sample_noise_coefficients(basis, cfg.noise, rng);
        CouplingRunConfig run_cfg;
        run_cfg.integ = cfg.integ;
        run_cfg.duration_factor = duration_factor;
        run_cfg.coolant = cfg.coolant;
        run_cfg.phases.side_u = rng.uniform();
        run_cfg.phases.phase_u = rng.uniform();
        run_cfg.phases.be_phase_u = rng.uniform();
        if (rec.E_init_K >= well.depth_K) {
            rec.outcome = SampleOutcome::untrapped;
            rec.E_fin_K = rec.E_init_K;
        } else {
            ComposedPotential noisy = pot;
            if (cfg.apply_noise) noisy.add_coefficients(noise_coeffs);
            try {
                const HarmonicCouplingResult r = run_harmonic_coupling(noisy, spec, e_init, run_cfg);
                rec.E_fin_K = joules_to_kelvin(r.E_fin);
                switch (r.outcome) {
                    case RunOutcome::completed: rec.outcome = SampleOutcome::cooled; break;
                    case RunOutcome::collision: rec.outcome = SampleOutcome::collided; break;
                    case RunOutcome::escaped: rec.outcome = SampleOutcome::untrapped; break;
                }
            } catch (const UntrappedError&) {
                rec.outcome = SampleOutcome::untrapped;
                rec.E_fin_K = rec.E_init_K;
            }
        }
        recs[i] = rec;
    }
    return aggregate_distribution(std::move(recs), cfg.histogram_bins);
}

std::string distribution_summary(const EnergyDistribution& d) {
    std::ostringstream os;
    const int total = static_cast<int>(d.samples.size());
    os << "samples: " << total << " (cooled " << d.n_cooled << ", untrapped " << d.n_untrapped
       << ", collided " << d.n_collided << ")\n";
    if (d.n_cooled > 0) {
        os << "mean energy: " << d.mean_energy_K * 1e3 << " mK\n";
        os << "drop edge estimate: " << d.drop_edge_K * 1e3 << " mK\n";
        for (double thr : {0.1, 0.26, 0.4, 0.46, 0.6, 1.0})
            os << "fraction of trapped below " << thr << " K: " << d.fraction_below(thr) << "\n";
    }
    return os.str();
}

}  // namespace dwsim
