#include <cmath>

#include "doctest.h"
#include "dwsim/protocols.hpp"

using namespace dwsim;
using namespace dwsim::constants;

namespace {

const ElectrodeBasis& basis() {
    static const ElectrodeBasis b = ElectrodeBasis::build_analytic(TrapGeometry{}, 200);
    return b;
}

DoubleWellSpec resonant_spec(SpeciesLabel la, double f, double s0) {
    const ParticleSpecies a = species(la);
    const ParticleSpecies b = species(SpeciesLabel::beryllium9_ion);
    const double w = 2 * pi * f;
    const double dw = coulomb_detuning(a, b, w, s0);
    return make_double_well_spec(a, b, f, (w + dw) / (2 * pi), s0);
}

}  // namespace

TEST_CASE("synthetic resonant coupling transfers essentially all energy") {
    DoubleWellSpec spec = resonant_spec(SpeciesLabel::proton, 400e3, 0.7e-3);
    CouplingRunConfig cfg;
    cfg.coolant.zero_energy = true;
    cfg.phases.phase_u = 0.0;
    const double e0 = kelvin_to_joules(0.1);
    const HarmonicCouplingResult r = run_harmonic_coupling_synthetic(spec, e0, cfg);
    REQUIRE(r.outcome == RunOutcome::completed);
    CHECK(r.transfer_fraction > 0.999);
    CHECK(r.t_min == doctest::Approx(r.tau_ex).epsilon(0.05));
}

TEST_CASE("zero initial energy stays at the noise floor") {
    DoubleWellSpec spec = resonant_spec(SpeciesLabel::proton, 400e3, 0.7e-3);
    CouplingRunConfig cfg;
    cfg.coolant.zero_energy = true;
    cfg.duration_override = 2e-3;
    const HarmonicCouplingResult r = run_harmonic_coupling_synthetic(spec, 0.0, cfg);
    CHECK(r.E_fin <= 0.0 + 1e-28);  // residual from the interaction-shifted equilibria
}

TEST_CASE("large detuning suppresses the transfer per the resonance curve") {
    const double f = 400e3, s0 = 0.7e-3;
    DoubleWellSpec spec = resonant_spec(SpeciesLabel::proton, f, s0);
    const double tau = exchange_time(spec.species_a, spec.species_b, spec.omega_a, spec.omega_b,
                                     s0);
    const double gamma = resonance_hwhm(tau);
    const double df = 5.0 * gamma;
    spec.omega_b += 2 * pi * df;
    CouplingRunConfig cfg;
    cfg.coolant.zero_energy = true;
    cfg.phases.phase_u = 0.0;
    cfg.duration_factor = 1.0;
    cfg.energy_stride = 4;
    const HarmonicCouplingResult r =
        run_harmonic_coupling_synthetic(spec, kelvin_to_joules(0.05), cfg);
    const double expected = 1.0 / (1.0 + std::pow(df / gamma, 2));
    CHECK(r.transfer_fraction == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("harmonic boundary of a perfectly harmonic well is depth-limited") {
    DoubleWellSpec spec = resonant_spec(SpeciesLabel::proton, 400e3, 0.7e-3);
    CouplingRunConfig cfg;
    cfg.coolant.zero_energy = true;
    cfg.phases.phase_u = 0.0;
    auto cooled = [&](double eK) {
        const HarmonicCouplingResult r =
            run_harmonic_coupling_synthetic(spec, kelvin_to_joules(eK), cfg);
        return joules_to_kelvin(r.E_fin) < 1e-3;
    };
    const double depth = 0.02;  // keep amplitudes small and the runtime short
    const double emax = harmonic_boundary_bisect(cooled, depth, 1e-3, 0.01);
    CHECK(emax == doctest::Approx(0.98 * depth).epsilon(1e-9));
}

TEST_CASE("sweep schedule construction") {
    const SweepStageParams par = default_sweep_stage(SpeciesLabel::proton);
    const DoubleWellSpec spec = sweep_spec_for(par, SpeciesLabel::proton);

    SUBCASE("two waypoints degenerate to one linear ramp") {
        const SweepSchedule s = build_sweep(spec, basis(), 500e3, 470e3, 0.010, 2);
        REQUIRE(s.size() == 2);
        CHECK(s.f_be.front() == 470e3);
        CHECK(s.f_be.back() == 500e3);
        CHECK(s.times.front() == 0.0);
        CHECK(s.times.back() == 0.010);
    }

    SUBCASE("default ladder is monotone, spans the range, honors duration") {
        const SweepSchedule s = build_sweep(spec, basis(), 500e3, 470e3, 0.050, 48);
        REQUIRE(s.size() >= 8);
        CHECK(s.times.front() == 0.0);
        CHECK(s.times.back() == doctest::Approx(0.050));
        CHECK(s.f_be.front() == doctest::Approx(470e3).epsilon(1e-6));
        CHECK(s.f_be.back() == doctest::Approx(500e3).epsilon(1e-9));
        for (size_t i = 1; i < s.size(); ++i) {
            CHECK(s.times[i] > s.times[i - 1]);
            CHECK(s.f_be[i] > s.f_be[i - 1]);
        }
        // every waypoint keeps the particle-a well at its target frequency
        const ComposedPotential& mid = s.potentials[s.size() / 2];
        const double curv = spec.species_a.charge * mid.eval(spec.z_a0, 2);
        const double f_a = std::sqrt(curv / spec.species_a.mass) / (2 * pi);
        CHECK(f_a == doctest::Approx(500e3).epsilon(1e-9));
    }

    SUBCASE("bad ranges are rejected") {
        CHECK_THROWS_AS(build_sweep(spec, basis(), 470e3, 500e3, 0.1, 8), SolverError);
        CHECK_THROWS_AS(build_sweep(spec, basis(), 500e3, 470e3, -1.0, 8), SolverError);
    }
}

TEST_CASE("zero-length sweep run echoes the initial energy") {
    const SweepStageParams par = default_sweep_stage(SpeciesLabel::proton);
    const DoubleWellSpec spec = sweep_spec_for(par, SpeciesLabel::proton);
    const SweepSchedule s = build_sweep(spec, basis(), 500e3, 470e3, 0.010, 2);
    SweepRunConfig cfg;
    cfg.n_sweeps = 0;
    const SweepResult r = run_sweep(s, kelvin_to_joules(1.2), cfg);
    CHECK(joules_to_kelvin(r.E_fin) == doctest::Approx(1.2));
}

TEST_CASE("short sweep does not heat a trapped particle") {
    const SweepStageParams par = default_sweep_stage(SpeciesLabel::proton);
    const DoubleWellSpec spec = sweep_spec_for(par, SpeciesLabel::proton);
    const SweepSchedule s = build_sweep(spec, basis(), 500e3, 470e3, 0.030, 24);
    SweepRunConfig cfg;
    cfg.n_sweeps = 1;
    for (double eK : {0.4, 2.0}) {
        const SweepResult r = run_sweep(s, kelvin_to_joules(eK), cfg);
        REQUIRE(r.outcome == RunOutcome::completed);
        // energy may only flow out (small wobble/re-ramp tolerance)
        CHECK(joules_to_kelvin(r.E_fin) < eK * 1.005 + 1e-4);
    }
}

TEST_CASE("ground-state protocol plan reproduces the staged arithmetic") {
    const ProtocolPlan p = plan_ground_state_protocol(SpeciesLabel::proton);
    REQUIRE(p.stages.size() == 3);
    CHECK(p.stages[0].repetitions == 2);
    CHECK(p.stages[0].duration_per_rep == doctest::Approx(0.180));
    CHECK(p.stages[1].repetitions == 4);
    CHECK(p.stages[1].tau_ex == doctest::Approx(29.4e-3).epsilon(0.01));
    CHECK(p.stages[1].f_be_lo / 1e3 == doctest::Approx(400.023).epsilon(1e-5));
    CHECK(p.stages[2].repetitions == 3);
    CHECK(p.stages[2].tau_ex == doctest::Approx(4.6e-3).epsilon(0.01));
    CHECK(p.stages[2].f_be_lo / 1e3 == doctest::Approx(100.144).epsilon(1e-5));
    // rounded per-transfer times reproduce the published totals exactly
    CHECK(p.total_time_rounded == doctest::Approx(0.4914).epsilon(1e-9));
    CHECK(std::abs(p.total_time - 0.490) < 0.0025);

    const ProtocolPlan q = plan_ground_state_protocol(SpeciesLabel::antiproton);
    CHECK(q.stages[0].duration_per_rep == doctest::Approx(0.242));
    CHECK(q.stages[1].repetitions == 4);
    CHECK(q.stages[1].tau_ex == doctest::Approx(20.8e-3).epsilon(0.01));
    CHECK(q.stages[1].f_be_lo / 1e3 == doctest::Approx(449.968).epsilon(1e-5));
    CHECK(q.stages[2].f_be_lo / 1e3 == doctest::Approx(99.856).epsilon(1e-5));
    CHECK(q.total_time_rounded == doctest::Approx(0.5810).epsilon(1e-9));
    CHECK(std::abs(q.total_time - 0.580) < 0.0025);

    CHECK_THROWS_AS(plan_ground_state_protocol(SpeciesLabel::beryllium9_ion),
                    std::invalid_argument);

    // geometric-decay repetition arithmetic: 80% transfer from 460 mK needs
    // four repetitions to cross 1 mK (0.2^3 = 3.7 mK is not enough)
    CHECK(0.46 * std::pow(0.2, 3) > 1e-3);
    CHECK(0.46 * std::pow(0.2, 4) < 1e-3);
}
