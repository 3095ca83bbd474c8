#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dwsim/electrode_basis.hpp"
#include "dwsim/species.hpp"

namespace dwsim {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CharacterizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DoubleWellSpec {
    ParticleSpecies species_a;  // particle of interest
    ParticleSpecies species_b;  // coolant ion
    double z_a0 = 0.0;          // m
    double z_b0 = 0.0;          // m
    double omega_a = 0.0;       // rad/s, curvature target at z_a0
    double omega_b = 0.0;       // rad/s, curvature target at z_b0
    double delta_s0 = 0.0;      // midpoint offset used to place the wells, m
    bool null_higher_orders = true;
    // Optional 4th-derivative target at z_a0 (V/m^4) replacing the plain
    // null; shapes the particle's anharmonic frequency-energy curve.
    double quartic_a = 0.0;

    double s0() const { return std::abs(z_b0 - z_a0); }
};

// Coolant sits on the +z side; delta_s0 shifts the pair midpoint toward it.
DoubleWellSpec make_double_well_spec(const ParticleSpecies& a, const ParticleSpecies& b,
                                     double f_a, double f_b, double s0, double delta_s0 = 0.0,
                                     bool null_higher_orders = true, double quartic_a = 0.0);

struct ConstraintSystem {
    Eigen::MatrixXd matrix;        // rows x n_electrodes
    Eigen::VectorXd targets;
    Eigen::VectorXd row_scale;     // characteristic magnitude used for balancing
    std::vector<std::string> row_names;
};

ConstraintSystem assemble_constraints(const DoubleWellSpec& spec, const ElectrodeBasis& basis);

struct VoltageSet {
    std::vector<double> voltages;  // V
    double residual = 0.0;         // max scaled constraint violation
    double norm = 0.0;             // Euclidean norm, V
    double max_abs_voltage = 0.0;
    bool over_voltage_warning = false;  // any |V_i| > 10 V
};

VoltageSet solve_min_norm(const ConstraintSystem& sys);

inline VoltageSet solve_double_well(const DoubleWellSpec& spec, const ElectrodeBasis& basis) {
    return solve_min_norm(assemble_constraints(spec, basis));
}

struct WellInfo {
    double z_min = 0.0;        // m
    double f_local = 0.0;      // Hz, from curvature
    double depth_K = 0.0;      // barrier height over k_B
    double barrier_inner_K = 0.0;  // toward the partner well
    double barrier_outer_K = 0.0;  // away from it
    double trap_lo = 0.0, trap_hi = 0.0;  // trapping interval, m
};

struct WellCharacterization {
    WellInfo a, b;
    // filled by the coupling protocols, not by characterize() itself
    double harmonic_boundary_K = 0.0;
    double harmonic_lo = 0.0, harmonic_hi = 0.0;
};

WellCharacterization characterize(const ComposedPotential& pot, const DoubleWellSpec& spec);
WellInfo characterize_well(const ComposedPotential& pot, double z_guess, double charge,
                           double mass, double partner_direction);

// Locate the potential-energy minimum for a species near z_guess by
// bracketed root-finding on q*Phi'.
double locate_minimum(const ComposedPotential& pot, double z_guess, double charge,
                      double search_halfwidth);

struct OffsetScanPoint {
    double delta_s0;
    double score_K;  // harmonic-boundary energy (or other figure of merit)
};

struct OffsetScanResult {
    double best_delta_s0 = 0.0;
    std::vector<OffsetScanPoint> table;
};

// Scans delta_s0 on a grid and returns the offset maximizing the supplied
// score (protocols provide the harmonic-boundary score).
OffsetScanResult optimize_offset(
    const DoubleWellSpec& base, const ElectrodeBasis& basis, double half_range, double step,
    const std::function<double(const DoubleWellSpec&)>& score);

}  // namespace dwsim
