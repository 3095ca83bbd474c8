#include "dwsim/analysis.hpp"

#include <cmath>

namespace dwsim {

ResonanceCurve scan_resonance(const DoubleWellSpec& base, const ElectrodeBasis& basis,
                              double e_init, const std::vector<double>& detunings_Hz,
                              CouplingRunConfig cfg) {
    ResonanceCurve curve;
    curve.detuning_Hz = detunings_Hz;
    curve.transfer_fraction.assign(detunings_Hz.size(), 0.0);
    curve.gamma_predicted_Hz = resonance_hwhm(
        exchange_time(base.species_a, base.species_b, base.omega_a, base.omega_b, base.s0()));
    cfg.duration_factor = 1.0;  // one exchange window at each detuning's own tau

    const auto n = static_cast<int>(detunings_Hz.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        DoubleWellSpec spec = base;
        spec.omega_b = base.omega_b + 2.0 * constants::pi * detunings_Hz[i];
        const VoltageSet v = solve_double_well(spec, basis);
        const ComposedPotential pot = basis.compose(v.voltages);
        const HarmonicCouplingResult r = run_harmonic_coupling(pot, spec, e_init, cfg);
        curve.transfer_fraction[i] =
            (r.outcome == RunOutcome::completed) ? r.transfer_fraction : 0.0;
    }
    curve.fit = fit_lorentzian(curve.detuning_Hz, curve.transfer_fraction);
    return curve;
}

FrequencyFluctuation estimate_sigma_f(const DoubleWellSpec& spec, const ElectrodeBasis& basis,
                                      const VoltageNoise& noise, int n_samples,
                                      std::uint64_t seed) {
    const VoltageSet v = solve_double_well(spec, basis);
    const ComposedPotential base = basis.compose(v.voltages);
    const double span = base.z_max() - base.z_min();
    const double z_a = locate_minimum(base, spec.z_a0, spec.species_a.charge, span / 6.0);
    const double z_b = locate_minimum(base, spec.z_b0, spec.species_b.charge, span / 6.0);

    std::vector<double> diffs(n_samples, 0.0);
    std::vector<char> valid(n_samples, 0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_samples; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        std::vector<double> dv(basis.n_electrodes());
        for (double& x : dv) x = rng.normal(noise.sigma_V);
        ComposedPotential pot = base;
        pot.add_coefficients(basis.compose(dv).coefficients());
        try {
            const double za = locate_minimum(pot, z_a, spec.species_a.charge, 40e-6);
            const double zb = locate_minimum(pot, z_b, spec.species_b.charge, 40e-6);
            const double ca = spec.species_a.charge * pot.eval(za, 2);
            const double cb = spec.species_b.charge * pot.eval(zb, 2);
            if (ca > 0 && cb > 0) {
                const double fa = std::sqrt(ca / spec.species_a.mass) / (2.0 * constants::pi);
                const double fb = std::sqrt(cb / spec.species_b.mass) / (2.0 * constants::pi);
                diffs[i] = fa - fb;
                valid[i] = 1;
            }
        } catch (const std::exception&) {
            // minimum lost under this draw; excluded and counted
        }
    }

    FrequencyFluctuation out;
    double mean = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        if (valid[i]) {
            mean += diffs[i];
            ++out.n_ok;
        } else {
            ++out.n_excluded;
        }
    }
    if (out.n_ok < 2) return out;
    mean /= out.n_ok;
    double var = 0.0;
    for (int i = 0; i < n_samples; ++i)
        if (valid[i]) var += (diffs[i] - mean) * (diffs[i] - mean);
    out.sigma_f_Hz = std::sqrt(var / (out.n_ok - 1));
    return out;
}

SigmaFScan scan_sigma_f(const DoubleWellSpec& base, const ElectrodeBasis& basis,
                        const VoltageNoise& noise, const std::vector<double>& freqs_Hz,
                        int n_samples, std::uint64_t seed) {
    SigmaFScan scan;
    scan.f_Hz = freqs_Hz;
    scan.sigma_f_Hz.resize(freqs_Hz.size());
    for (size_t i = 0; i < freqs_Hz.size(); ++i) {
        DoubleWellSpec spec = base;
        const double w = 2.0 * constants::pi * freqs_Hz[i];
        const double dw = coulomb_detuning(base.species_a, base.species_b, w, base.s0());
        spec.omega_a = w;
        spec.omega_b = w + dw;
        scan.sigma_f_Hz[i] =
            estimate_sigma_f(spec, basis, noise, n_samples, seed + i).sigma_f_Hz;
    }
    scan.reciprocal_fit = fit_power_coefficient(scan.f_Hz, scan.sigma_f_Hz, -1.0);
    return scan;
}

StabilityPoint required_voltage_stability(double s0, double E_max_K, double f_Emax_Hz,
                                          double gamma_Hz, double sigma_f_Hz, double p_target,
                                          double sigma_ref_V) {
    StabilityPoint pt;
    pt.s0 = s0;
    pt.E_max_K = E_max_K;
    pt.f_Emax_Hz = f_Emax_Hz;
    pt.gamma_Hz = gamma_Hz;
    pt.sigma_f_Hz = sigma_f_Hz;
    pt.sigma_f_target_Hz = gamma_Hz / (2.0 * required_ratio_for(p_target));
    pt.V_pp = 4.0 * sigma_ref_V * pt.sigma_f_target_Hz / sigma_f_Hz;
    return pt;
}

}  // namespace dwsim
