#pragma once

#include <cstdint>
#include <vector>

#include "dwsim/fits.hpp"
#include "dwsim/montecarlo.hpp"
#include "dwsim/protocols.hpp"

namespace dwsim {

struct ResonanceCurve {
    std::vector<double> detuning_Hz;
    std::vector<double> transfer_fraction;
    LorentzianFit fit;
    double gamma_predicted_Hz = 0.0;  // 1 / (2 tau_ex)
};

// Transfer fraction versus coolant detuning: for each point the double well
// is rebuilt with the coolant at f + df (the base spec already carries the
// interaction compensation at df = 0) and one exchange window is simulated.
ResonanceCurve scan_resonance(const DoubleWellSpec& base, const ElectrodeBasis& basis,
                              double e_init, const std::vector<double>& detunings_Hz,
                              CouplingRunConfig cfg = {});

struct FrequencyFluctuation {
    double sigma_f_Hz = 0.0;  // std dev of f_a - f_b under voltage noise
    int n_ok = 0;
    int n_excluded = 0;
};

FrequencyFluctuation estimate_sigma_f(const DoubleWellSpec& spec, const ElectrodeBasis& basis,
                                      const VoltageNoise& noise, int n_samples = 1000,
                                      std::uint64_t seed = 1);

struct SigmaFScan {
    std::vector<double> f_Hz;
    std::vector<double> sigma_f_Hz;
    PowerFit reciprocal_fit;  // sigma_f = c / f
};

SigmaFScan scan_sigma_f(const DoubleWellSpec& base, const ElectrodeBasis& basis,
                        const VoltageNoise& noise, const std::vector<double>& freqs_Hz,
                        int n_samples = 1000, std::uint64_t seed = 1);

struct Robustness {
    double ratio = 0.0;  // gamma / (2 sigma_f)
    double p = 0.0;      // energy fraction transferable at 95.4% confidence
};

inline Robustness robustness(double gamma_Hz, double sigma_f_Hz) {
    Robustness r;
    r.ratio = gamma_Hz / (2.0 * sigma_f_Hz);
    r.p = 1.0 / (1.0 + 1.0 / (r.ratio * r.ratio));
    return r;
}

inline double required_ratio_for(double p) { return 1.0 / std::sqrt(1.0 / p - 1.0); }

struct StabilityPoint {
    double s0 = 0.0;             // m
    double E_max_K = 0.0;        // largest harmonically coolable energy
    double f_Emax_Hz = 0.0;      // frequency delivering E_max
    double gamma_Hz = 0.0;       // resonance HWHM at f_Emax
    double sigma_f_Hz = 0.0;     // fluctuation at the reference noise level
    double sigma_f_target_Hz = 0.0;
    double V_pp = 0.0;           // required supply stability, V peak-to-peak
};

// Peak-to-peak supply stability for a target transfer fraction: the factor 4
// covers sigma->pp and the 95.4% -> 68.3% confidence conversion.
StabilityPoint required_voltage_stability(double s0, double E_max_K, double f_Emax_Hz,
                                          double gamma_Hz, double sigma_f_Hz,
                                          double p_target = 0.8, double sigma_ref_V = 250e-9);

}  // namespace dwsim
