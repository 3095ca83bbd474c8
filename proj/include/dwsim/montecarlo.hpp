#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dwsim/protocols.hpp"
#include "dwsim/rng.hpp"

namespace dwsim {

struct BoltzmannSampler {
    double T_z = 4.0;  // K

    // exponential with mean k_B T_z via inverse CDF
    double sample(RngStream& rng) const {
        return rng.exponential(kelvin_to_joules(T_z));
    }
};

struct VoltageNoise {
    double sigma_V = 250e-9;  // V, per electrode, one static draw per run
};

// One Gaussian offset per electrode, applied to every waypoint for the whole
// trajectory. Returned as composed potential coefficients (linear in dV).
std::vector<double> sample_noise_coefficients(const ElectrodeBasis& basis,
                                              const VoltageNoise& noise, RngStream& rng,
                                              std::vector<double>* delta_voltages = nullptr);

enum class SampleOutcome { cooled, untrapped, collided };

inline const char* outcome_name(SampleOutcome o) {
    switch (o) {
        case SampleOutcome::cooled: return "cooled";
        case SampleOutcome::untrapped: return "untrapped";
        case SampleOutcome::collided: return "collided";
    }
    return "?";
}

struct SampleRecord {
    int index = 0;
    double E_init_K = 0.0;
    double E_fin_K = 0.0;
    SampleOutcome outcome = SampleOutcome::cooled;
};

struct EnergyDistribution {
    std::vector<SampleRecord> samples;       // in index order
    std::vector<double> bin_edges_K;         // size bins+1
    std::vector<double> density;             // normalized: sum(density*width) = 1
    int n_cooled = 0, n_untrapped = 0, n_collided = 0;
    double mean_energy_K = 0.0;   // over cooled samples
    double drop_edge_K = 0.0;     // largest relative gap in the sorted energies

    double fraction_below(double threshold_K) const;
};

EnergyDistribution aggregate_distribution(std::vector<SampleRecord> samples, int n_bins = 60);

struct CampaignConfig {
    int n_samples = 100;
    std::uint64_t seed = 1;
    BoltzmannSampler sampler;
    VoltageNoise noise;
    bool apply_noise = true;
    int n_sweeps = 2;
    IntegratorConfig integ;
    CoolantInit coolant;
    int threads = 0;  // 0 = library default
    int histogram_bins = 60;
};

// Frequency-sweep Monte Carlo campaign. The parallel driver and the serial
// reference produce byte-identical per-sample results for a fixed seed.
EnergyDistribution run_sweep_campaign(const SweepSchedule& sched, const ElectrodeBasis& basis,
                                      const CampaignConfig& cfg);
EnergyDistribution run_sweep_campaign_serial(const SweepSchedule& sched,
                                             const ElectrodeBasis& basis,
                                             const CampaignConfig& cfg);

// Single-sample kernel shared by both drivers (and the benchmark).
SampleRecord run_sweep_sample(const SweepSchedule& sched, const ElectrodeBasis& basis,
                              const CampaignConfig& cfg, double depth_K, int index);

// Static harmonic-coupling campaign over Boltzmann initial energies.
EnergyDistribution run_harmonic_campaign(const ComposedPotential& pot, const DoubleWellSpec& spec,
                                         const ElectrodeBasis& basis, const CampaignConfig& cfg,
                                         double duration_factor = 1.2);

std::string distribution_summary(const EnergyDistribution& d);

}  // namespace dwsim
