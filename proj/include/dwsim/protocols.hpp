#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dwsim/dynamics.hpp"
#include "dwsim/electrode_basis.hpp"
#include "dwsim/potential_solver.hpp"

namespace dwsim {

// Oscillation phases used to initialize a run. The particle of interest is
// placed at a turning point and propagated a fraction of its own period; the
// coolant starts on its harmonic orbit at the given phase angle.
struct InitPhases {
    double side_u = 0.75;     // < 0.5 places the turning point on the inner side
    double phase_u = 0.25;    // fraction of an oscillation period to advance
    double be_phase_u = 0.0;  // coolant phase angle / (2 pi)
};

// Coolant "motional ground state": classical energy hbar*omega/2 with the
// given phase, or exactly zero when zero_energy is set.
struct CoolantInit {
    bool zero_energy = false;
};

TwoBodyState initialize_in_potential(const ComposedPotential& pot, const DoubleWellSpec& spec,
                                     double e_init, const InitPhases& phases,
                                     const CoolantInit& coolant, double dt);

// ---------------------------------------------------------------------------
// Static harmonic-coupling stage
// ---------------------------------------------------------------------------

struct CouplingRunConfig {
    IntegratorConfig integ;
    double duration_factor = 1.5;    // run length in units of tau_ex
    double duration_override = 0.0;  // seconds; 0 = use factor * tau_ex
    std::int64_t energy_stride = 16;
    CoolantInit coolant;
    InitPhases phases;
    bool record_trace = false;
    std::int64_t trace_stride = 256;
};

struct TracePoint {
    double t, z_a, v_a, E_a, z_b, v_b, E_b, E_int, E_total;
};

struct HarmonicCouplingResult {
    double E_init = 0.0;
    double E_fin = 0.0;   // minimum particle-a energy over the run
    double t_min = 0.0;   // time of that minimum
    double E_a_last = 0.0;
    double transfer_fraction = 0.0;
    RunOutcome outcome = RunOutcome::completed;
    double tau_ex = 0.0;
    std::vector<TracePoint> trace;
};

HarmonicCouplingResult run_harmonic_coupling(const ComposedPotential& pot,
                                             const DoubleWellSpec& spec, double e_init,
                                             const CouplingRunConfig& cfg);

// Same dynamics in ideal per-particle harmonic wells (analytic reference
// geometry; the Coulomb term stays exact).
HarmonicCouplingResult run_harmonic_coupling_synthetic(const DoubleWellSpec& spec, double e_init,
                                                       const CouplingRunConfig& cfg);

// Largest initial energy still cooled below `threshold` (bisection to the
// given relative resolution).
double harmonic_boundary(const ComposedPotential& pot, const DoubleWellSpec& spec,
                         double threshold_K = 1e-3, double rel_resolution = 0.01,
                         CouplingRunConfig cfg = {});

// Bisection core shared with synthetic-well checks: `cooled(E_init_K)` says
// whether a run from that energy ends below the threshold.
double harmonic_boundary_bisect(const std::function<bool(double)>& cooled, double depth_K,
                                double threshold_K, double rel_resolution);

// ---------------------------------------------------------------------------
// Frequency sweep
// ---------------------------------------------------------------------------

struct SweepShape {
    // Time allocation follows the capture-rate limit dt ∝ dE / E^exponent
    // along the particle's measured frequency-energy curve.
    double exponent = 0.60;
    double e_floor_K = 0.05;      // lowest energy on the capture ladder
    double tail_fraction = 0.06;  // final linear approach to the top frequency
};

struct SweepSchedule {
    DoubleWellSpec base_spec;
    std::vector<double> times;  // s, ascending, playback order (cooling direction)
    std::vector<double> f_be;   // Hz, coolant well frequency per waypoint
    std::vector<VoltageSet> voltages;
    std::vector<ComposedPotential> potentials;
    double duration() const { return times.back(); }
    std::size_t size() const { return times.size(); }
};

// Solves the constraint system at each waypoint frequency; the particle-a
// well stays at spec.omega_a throughout. f_start > f_end; the returned
// waypoint list is in playback order (ascending frequency).
SweepSchedule build_sweep(const DoubleWellSpec& spec, const ElectrodeBasis& basis, double f_start,
                          double f_end, double total_duration, int n_waypoints = 64,
                          const SweepShape& shape = {});

// Schedule from explicit (time, f_be) waypoints.
SweepSchedule build_sweep_from_waypoints(const DoubleWellSpec& spec, const ElectrodeBasis& basis,
                                         const std::vector<double>& times,
                                         const std::vector<double>& f_be);

class SweepTrap {
public:
    SweepTrap(const SweepSchedule* sched, const std::vector<double>* noise_coeffs = nullptr)
        : sched_(sched), noise_(noise_coeffs) {
        // working copies truncated to the terms that matter for forces and
        // curvatures; the schedule keeps the full-precision potentials
        int keep = 1;
        for (const ComposedPotential& p : sched->potentials)
            keep = std::max(keep, p.effective_terms(2, 1e-11));
        waypoints_ = sched->potentials;
        for (ComposedPotential& p : waypoints_) p.truncate_terms(keep);
        prepare(0.0);
        z_a_cache_ = sched->base_spec.z_a0;
        z_b_cache_ = sched->base_spec.z_b0;
        refresh_minima();
    }

    void prepare(double t);
    void refresh_minima();

    double force_a(double z) const { return -qa() * scratch_.eval(z, 1); }
    double force_b(double z) const { return -qb() * scratch_.eval(z, 1); }
    double potential_energy_a(double z) const { return qa() * (scratch_.value(z) - phi_a_); }
    double potential_energy_b(double z) const { return qb() * (scratch_.value(z) - phi_b_); }
    double z_min_a() const { return z_a_cache_; }
    double z_min_b() const { return z_b_cache_; }
    double domain_lo() const { return 0.97 * scratch_.z_min(); }
    double domain_hi() const { return 0.97 * scratch_.z_max(); }
    const ComposedPotential& current() const { return scratch_; }

private:
    double qa() const { return sched_->base_spec.species_a.charge; }
    double qb() const { return sched_->base_spec.species_b.charge; }

    const SweepSchedule* sched_;
    const std::vector<double>* noise_;
    std::vector<ComposedPotential> waypoints_;
    ComposedPotential scratch_;
    std::size_t seg_ = 0;
    double z_a_cache_ = 0.0, z_b_cache_ = 0.0;
    double phi_a_ = 0.0, phi_b_ = 0.0;
};

struct SweepRunConfig {
    IntegratorConfig integ;
    int n_sweeps = 1;
    CoolantInit coolant;
    InitPhases phases;          // phases for the first sweep
    double be_phase_u2 = 0.5;   // coolant phase at each reinitialization
    bool record_trace = false;
    std::int64_t trace_stride = 4096;
};

struct SweepResult {
    double E_init = 0.0;
    double E_fin = 0.0;  // particle-a energy at the last timestep
    RunOutcome outcome = RunOutcome::completed;
    std::vector<TracePoint> trace;
};

SweepResult run_sweep(const SweepSchedule& sched, double e_init, const SweepRunConfig& cfg,
                      const std::vector<double>* noise_coeffs = nullptr);

// 4th-derivative target giving the particle well a frequency-energy slope of
// roughly `slope_hz_per_K` (quartic perturbation theory; negative = softening).
double quartic_target_for_slope(const ParticleSpecies& sp, double f_particle,
                                double slope_hz_per_K);

// Default sweep operating point per species. The explicit quartic shaping
// keeps the frequency-energy curve monotone and steep enough for capture
// under the analytic surrogate basis.
struct SweepStageParams {
    double f_particle = 500e3;  // Hz
    double f_lo = 470e3;        // Hz
    double f_hi = 500e3;        // Hz
    double s0 = 0.7e-3;         // m
    double delta_s0 = 0.0;      // m
    double duration = 0.180;    // s, per sweep
    double slope_hz_per_K = -3000.0;
    int n_waypoints = 64;
    SweepShape shape;
};

SweepStageParams default_sweep_stage(SpeciesLabel label);

DoubleWellSpec sweep_spec_for(const SweepStageParams& p, SpeciesLabel label);

// ---------------------------------------------------------------------------
// Staged ground-state protocol plan
// ---------------------------------------------------------------------------

enum class StageKind { sweep, harmonic, ground_state };

struct ProtocolStage {
    StageKind kind;
    double f_particle = 0.0;  // Hz
    double f_be_lo = 0.0, f_be_hi = 0.0;  // Hz (equal for static stages)
    double s0 = 0.0;          // m
    int repetitions = 1;
    double duration_per_rep = 0.0;  // s
    double tau_ex = 0.0;            // s (static stages)
    double e_start_K = 0.0, e_target_K = 0.0;
};

struct ProtocolPlan {
    SpeciesLabel species;
    double transfer_efficiency = 0.8;
    std::vector<ProtocolStage> stages;
    double total_time = 0.0;          // s, exact stage arithmetic
    double total_time_rounded = 0.0;  // s, per-transfer times rounded to 0.1 ms
};

ProtocolPlan plan_ground_state_protocol(SpeciesLabel species, double transfer_efficiency = 0.8);

std::string format_protocol_plan(const ProtocolPlan& plan);

}  // namespace dwsim
