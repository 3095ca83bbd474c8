#include <cmath>

#include "doctest.h"
#include "dwsim/dynamics.hpp"

using namespace dwsim;
using namespace dwsim::constants;

namespace {

const ElectrodeBasis& basis() {
    static const ElectrodeBasis b = ElectrodeBasis::build_analytic(TrapGeometry{}, 200);
    return b;
}

ParticleSpecies P() { return species(SpeciesLabel::proton); }
ParticleSpecies Pbar() { return species(SpeciesLabel::antiproton); }
ParticleSpecies Be() { return species(SpeciesLabel::beryllium9_ion); }

}  // namespace

TEST_CASE("exchange time golden values") {
    // Rounded tabulated values: 29.4 / 20.8 / 4.6 ms
    const double w400 = 2 * pi * 400e3, w450 = 2 * pi * 450e3, w100 = 2 * pi * 100e3;
    CHECK(exchange_time(P(), Be(), w400, w400, 0.7e-3) ==
          doctest::Approx(29.4e-3).epsilon(0.01));
    CHECK(exchange_time(Pbar(), Be(), w450, w450, 0.6e-3) ==
          doctest::Approx(20.8e-3).epsilon(0.01));
    CHECK(exchange_time(P(), Be(), w100, w100, 0.6e-3) ==
          doctest::Approx(4.6e-3).epsilon(0.01));
    // symmetric under particle exchange
    CHECK(exchange_time(P(), Be(), w400, w400, 0.7e-3) ==
          exchange_time(Be(), P(), w400, w400, 0.7e-3));
}

TEST_CASE("interaction detuning golden values") {
    const double df1 = coulomb_detuning(P(), Be(), 2 * pi * 400e3, 0.7e-3) / (2 * pi);
    const double df2 = coulomb_detuning(P(), Be(), 2 * pi * 100e3, 0.6e-3) / (2 * pi);
    const double df3 = coulomb_detuning(Pbar(), Be(), 2 * pi * 450e3, 0.6e-3) / (2 * pi);
    CHECK(std::abs(400023.0 - (400e3 + df1)) < 1.0);
    CHECK(std::abs(100144.0 - (100e3 + df2)) < 1.0);
    CHECK(std::abs(449968.0 - (450e3 + df3)) < 1.0);
    CHECK(df3 < 0.0);

    // equal masses: no relative shift
    CHECK(coulomb_detuning(P(), P(), 2 * pi * 400e3, 0.7e-3) == 0.0);
}

TEST_CASE("coulomb pair force magnitude and antisymmetry") {
    const double k = P().charge * Be().charge / (4 * pi * epsilon0);
    // q^2/(4 pi eps0 d^2) at 0.7 mm
    CHECK(coulomb_force(k, 0.7e-3) == doctest::Approx(4.71e-22).epsilon(0.01));
    CHECK(coulomb_force(k, 0.7e-3) == -coulomb_force(k, -0.7e-3));
    // attractive for opposite charges
    const double k2 = Pbar().charge * Be().charge / (4 * pi * epsilon0);
    CHECK(coulomb_force(k2, 0.7e-3) < 0.0);
}

TEST_CASE("harmonic oscillator period over 1000 periods") {
    // dt = 50 ns at 10 kHz oversamples by 2000x, which the 1e-6 period
    // tolerance requires (the Verlet frequency bias is (w*dt)^2/24).
    const double f0 = 10e3, w = 2 * pi * f0;
    const double m = P().mass;
    HarmonicPairTrap trap(m, w, 0.0, m, w, 1.0);
    const double dt = 50e-9;
    const double A = 1e-5;
    double z = A, v = 0.0;
    // integrate exactly 1000 periods' worth of steps and recover the phase
    const double T = 1.0 / f0;
    const auto n = static_cast<std::int64_t>(std::llround(1000.0 * T / dt));
    integrate_single_a(trap, m, z, v, dt, n);
    const double t_end = n * dt;
    // analytic: z = A cos(w t); measured phase drift gives the period error
    const double phase = std::atan2(-v / (w * A), z / A);
    const double drift = phase - std::remainder(w * t_end, 2 * pi);
    const double rel_period_err = std::abs(std::remainder(drift, 2 * pi)) / (w * t_end);
    CHECK(rel_period_err < 1e-6);
}

TEST_CASE("particle at rest at the minimum stays at rest") {
    const double w = 2 * pi * 400e3;
    HarmonicPairTrap trap(P().mass, w, 1e-4, Be().mass, w, 8e-4);
    double z = 1e-4, v = 0.0;
    integrate_single_a(trap, P().mass, z, v, 50e-9, 10000);
    CHECK(z == 1e-4);
    CHECK(v == 0.0);
}

TEST_CASE("time reversal returns the initial state") {
    const DoubleWellSpec spec =
        make_double_well_spec(P(), Be(), 500e3, 500e3, 0.7e-3);
    const VoltageSet volt = solve_double_well(spec, basis());
    const ComposedPotential pot = basis().compose(volt.voltages);
    StaticPotentialTrap trap(&pot, spec);
    TwoBodyParams p = two_body_params(spec, {});
    TwoBodyState st;
    st.z_a = spec.z_a0 - 2e-5;
    st.z_b = spec.z_b0 + 1e-6;
    st.v_a = 0.3;
    st.v_b = -0.1;
    const TwoBodyState init = st;
    const double dt = 20e-9;
    REQUIRE(integrate_two_body(trap, p, st, dt, 10000) == RunOutcome::completed);
    st.v_a = -st.v_a;
    st.v_b = -st.v_b;
    REQUIRE(integrate_two_body(trap, p, st, dt, 10000) == RunOutcome::completed);
    CHECK(st.z_a == doctest::Approx(init.z_a).epsilon(1e-9));
    CHECK(st.z_b == doctest::Approx(init.z_b).epsilon(1e-9));
    CHECK(-st.v_a == doctest::Approx(init.v_a).epsilon(1e-9));
    CHECK(-st.v_b == doctest::Approx(init.v_b).epsilon(1e-9));
}

TEST_CASE("no secular energy drift over 1e6 steps") {
    const double w = 2 * pi * 400e3;
    const double m = P().mass;
    HarmonicPairTrap trap(m, w, 0.0, m, w, 1.0);
    const double dt = 25e-9;  // 100x oversampling
    const double theta = w * dt;
    const double A = 3e-5;
    double z = A, v = 0.0;

    // the integrator exactly conserves the modified quadratic
    // E* = v^2/2 + w^2 (1 - theta^2/4) z^2/2; any secular drift shows there
    auto shadow = [&]() {
        return 0.5 * m * v * v + 0.5 * m * w * w * (1.0 - 0.25 * theta * theta) * z * z;
    };
    auto energy = [&]() { return 0.5 * m * v * v + trap.potential_energy_a(z); };
    const double S0 = shadow();
    const double E0 = energy();
    double e_max = E0, e_min = E0;
    for (int block = 0; block < 100; ++block) {
        integrate_single_a(trap, m, z, v, dt, 10000);
        e_max = std::max(e_max, energy());
        e_min = std::min(e_min, energy());
        CHECK(std::abs(shadow() - S0) / S0 < 1e-12);
    }
    // the raw energy stays inside its bounded periodic wobble, ~theta^2/4
    CHECK(e_max - e_min < 2.0 * 0.25 * theta * theta * E0);
}

TEST_CASE("collision guard aborts the trajectory") {
    const DoubleWellSpec spec =
        make_double_well_spec(Pbar(), Be(), 500e3, 500e3, 0.7e-3);
    HarmonicPairTrap trap(spec.species_a.mass, spec.omega_a, spec.z_a0, spec.species_b.mass,
                          spec.omega_b, spec.z_b0);
    TwoBodyParams p = two_body_params(spec, {});
    TwoBodyState st;
    // aim the antiproton at the coolant with enough velocity to defeat both
    // the spring and the attractive-collision guard distance
    st.z_a = spec.z_a0;
    st.z_b = spec.z_b0;
    st.v_a = 3000.0;
    const RunOutcome out = integrate_two_body(trap, p, st, 20e-9, 2000000);
    CHECK(out == RunOutcome::collision);
}

TEST_CASE("energy accounting zero reference and conservation") {
    const DoubleWellSpec spec =
        make_double_well_spec(P(), Be(), 500e3, 500e3, 0.7e-3);
    const VoltageSet volt = solve_double_well(spec, basis());
    const ComposedPotential pot = basis().compose(volt.voltages);
    StaticPotentialTrap trap(&pot, spec);
    TwoBodyParams p = two_body_params(spec, {});

    SUBCASE("rest at the minima gives zero energies") {
        TwoBodyState st;
        st.z_a = trap.z_min_a();
        st.z_b = trap.z_min_b();
        const TwoBodyEnergies e = two_body_energies(trap, p, st);
        CHECK(e.E_a == 0.0);
        CHECK(e.E_b == 0.0);
        CHECK(e.E_int == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("windowed total energy is conserved over a partial exchange") {
        TwoBodyState st;
        st.z_a = trap.z_min_a() - 1.5e-5;
        st.z_b = trap.z_min_b();
        const double dt = 20e-9;
        // window-average E_total over one axial period at both ends
        const int w = 100;
        double e0 = 0.0, e1 = 0.0;
        for (int i = 0; i < w; ++i) {
            integrate_two_body(trap, p, st, dt, 1);
            e0 += two_body_energies(trap, p, st).E_total;
        }
        integrate_two_body(trap, p, st, dt, 400000);
        for (int i = 0; i < w; ++i) {
            integrate_two_body(trap, p, st, dt, 1);
            e1 += two_body_energies(trap, p, st).E_total;
        }
        CHECK(std::abs(e1 - e0) / std::abs(e0) < 1e-6);
    }
}

TEST_CASE("anharmonic frequency: harmonic limit is exact") {
    const double w = 2 * pi * 321e3;
    const double m = P().mass;
    const double k = m * w * w;
    auto U = [&](double z) { return 0.5 * k * z * z; };
    for (double eK : {1e-4, 0.01, 1.0}) {
        const double f = anharmonic_frequency(U, 0.0, m, kelvin_to_joules(eK), -1.0, 1.0);
        CHECK(f == doctest::Approx(w / (2 * pi)).epsilon(1e-10));
    }
}

TEST_CASE("anharmonic frequency matches first-order quartic perturbation") {
    const double w0 = 2 * pi * 400e3;
    const double m = P().mass;
    const double k = m * w0 * w0;
    const double beta = -2e-8;  // J/m^4, softening
    auto U = [&](double z) { return 0.5 * k * z * z + beta * z * z * z * z; };
    const double eK = 0.05;
    const double E = kelvin_to_joules(eK);
    const double A2 = 2.0 * E / k;
    const double predicted = (w0 / (2 * pi)) * (1.0 + 1.5 * beta * A2 / k);
    const double f = anharmonic_frequency(U, 0.0, m, E, -1.0, 1.0);
    const double shift_sim = f - w0 / (2 * pi);
    const double shift_pred = predicted - w0 / (2 * pi);
    CHECK(shift_sim == doctest::Approx(shift_pred).epsilon(0.01));
}

TEST_CASE("frequency decreases with energy in the softened sweep well") {
    const ParticleSpecies p = P(), be = Be();
    // 4th-derivative target shaping ~ -3 kHz/K of frequency-energy slope
    const double kspring = p.mass * std::pow(2 * pi * 500e3, 2);
    const double beta = -3000.0 * kspring * kspring / (3.0 * 500e3 * k_boltzmann);
    const double quartic = 24.0 * beta / p.charge;
    const DoubleWellSpec spec =
        make_double_well_spec(p, be, 500e3, 500e3, 0.7e-3, 0.0, true, quartic);
    const VoltageSet volt = solve_double_well(spec, basis());
    const ComposedPotential pot = basis().compose(volt.voltages);
    const double zmin = locate_minimum(pot, spec.z_a0, p.charge, 1e-4);
    double prev = 1e99;
    for (double eK : {0.1, 0.3, 1.0, 2.0, 4.0, 6.0}) {
        const double f = axial_frequency_at_energy(pot, p, zmin, kelvin_to_joules(eK));
        CHECK(f < prev);
        prev = f;
    }
}

TEST_CASE("single-particle frequency pull from a stationary partner charge") {
    // heavy immobile partner: measured shift vs q_a q_b/(4 pi eps0 s^3 m w)
    const double f0 = 500e3, w = 2 * pi * f0, s0 = 0.7e-3;
    const ParticleSpecies p = P();
    const double m_heavy = 1.0;  // kg; the partner effectively does not move
    HarmonicPairTrap trap(p.mass, w, 0.0, m_heavy, w, s0);
    TwoBodyParams par{};
    par.m_a = p.mass;
    par.m_b = m_heavy;
    par.k_coulomb = p.charge * Be().charge / (4 * pi * epsilon0);
    par.min_separation = 1e-6;
    par.update_stride = 0;

    const double dt = 10e-9;
    const auto nsteps = static_cast<std::int64_t>(2000.0 / f0 / dt);
    // mean-crossing frequency; run once with and once without the partner
    // charge so the integrator's own frequency bias cancels
    auto measure = [&](double k_coul) {
        TwoBodyParams pp = par;
        pp.k_coulomb = k_coul;
        TwoBodyState st;
        st.z_a = 2e-6;
        st.z_b = s0;
        std::vector<double> zs;
        zs.reserve(nsteps / 4 + 1);
        double mean = 0.0;
        auto rec = [&](std::int64_t, const TwoBodyState& s) {
            zs.push_back(s.z_a);
            mean += s.z_a;
        };
        integrate_two_body(trap, pp, st, dt, nsteps, rec, 4);
        mean /= zs.size();
        int crossings = 0;
        double t_first = -1, t_last = -1;
        for (size_t i = 1; i < zs.size(); ++i) {
            if ((zs[i - 1] - mean) < 0 && (zs[i] - mean) >= 0) {
                const double frac = (mean - zs[i - 1]) / (zs[i] - zs[i - 1]);
                const double t = (i - 1 + frac) * 4 * dt;
                if (t_first < 0) t_first = t;
                t_last = t;
                ++crossings;
            }
        }
        REQUIRE(crossings > 10);
        return (crossings - 1) / (t_last - t_first);
    };
    const double df_meas = measure(par.k_coulomb) - measure(0.0);
    const double df_pred = coulomb_detuning_single(p, Be().charge, w, s0) / (2 * pi);
    CHECK(df_pred == doctest::Approx(20.4).epsilon(0.05));  // ~20 Hz at this point
    CHECK(df_meas == doctest::Approx(df_pred).epsilon(0.10));
}

TEST_CASE("coupled oscillators swap energy at the predicted exchange time") {
    const double f0 = 400e3, w_a = 2 * pi * f0, s0 = 0.7e-3;
    const ParticleSpecies pa = P(), pb = Be();
    const double dw = coulomb_detuning(pa, pb, w_a, s0);
    DoubleWellSpec spec = make_double_well_spec(pa, pb, f0, (w_a + dw) / (2 * pi), s0);
    HarmonicPairTrap trap(pa.mass, spec.omega_a, spec.z_a0, pb.mass, spec.omega_b, spec.z_b0);
    TwoBodyParams par = two_body_params(spec, {});
    par.update_stride = 0;

    const double E0 = kelvin_to_joules(0.050);
    const double A = std::sqrt(2 * E0 / (pa.mass * spec.omega_a * spec.omega_a));
    TwoBodyState st;
    st.z_a = spec.z_a0 + A;
    st.z_b = spec.z_b0;
    const double tau = exchange_time(pa, pb, spec.omega_a, spec.omega_b, s0);
    const double dt = 25e-9;
    const auto nsteps = static_cast<std::int64_t>(1.4 * tau / dt);
    double e_min = E0, t_min = 0;
    auto rec = [&](std::int64_t, const TwoBodyState& s) {
        const TwoBodyEnergies e = two_body_energies(trap, par, s);
        if (e.E_a < e_min) {
            e_min = e.E_a;
            t_min = s.t;
        }
    };
    REQUIRE(integrate_two_body(trap, par, st, dt, nsteps, rec, 20) == RunOutcome::completed);
    CHECK(e_min / E0 < 1e-3);                       // full swap
    CHECK(t_min == doctest::Approx(tau).epsilon(0.05));  // at tau_ex
}
