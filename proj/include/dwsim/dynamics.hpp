#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "dwsim/composed_potential.hpp"
#include "dwsim/constants.hpp"
#include "dwsim/math_util.hpp"
#include "dwsim/potential_solver.hpp"
#include "dwsim/species.hpp"

namespace dwsim {

struct UntrappedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TwoBodyState {
    double t = 0.0;
    double z_a = 0.0, v_a = 0.0;
    double z_b = 0.0, v_b = 0.0;
};

enum class RunOutcome { completed, collision, escaped };

struct IntegratorConfig {
    double dt = 0.0;  // 0 = pick from the fastest axial period
    double collision_min_separation = 1e-6;  // m
    int coefficient_update_stride = 64;      // steps between time-dependent refreshes

    // dt <= T_axial/100, clamped to [10 ns, 50 ns]
    static double default_dt(double f_max) {
        const double dt = 1.0 / (100.0 * f_max);
        return std::clamp(dt, 10e-9, 50e-9);
    }
};

struct TwoBodyEnergies {
    double E_a = 0.0, E_b = 0.0, E_int = 0.0, E_total = 0.0;
};

// ---------------------------------------------------------------------------
// Closed-form coupling analytics
// ---------------------------------------------------------------------------

// Full energy swap time of two resonantly coupled oscillators a distance s0
// apart; symmetric under a <-> b.
inline double exchange_time(const ParticleSpecies& a, const ParticleSpecies& b, double omega_a,
                            double omega_b, double s0) {
    using namespace constants;
    return 2.0 * pi * pi * epsilon0 * s0 * s0 * s0 * std::sqrt(a.mass * b.mass) *
           std::sqrt(omega_a * omega_b) / std::abs(a.charge * b.charge);
}

// Relative angular frequency shift between the two coupled particles induced
// by the interaction curvature; signed (negative when q_a q_b < 0).
inline double coulomb_detuning(const ParticleSpecies& a, const ParticleSpecies& b, double omega,
                               double s0) {
    using namespace constants;
    return (1.0 / a.mass - 1.0 / b.mass) * a.charge * b.charge /
           (4.0 * pi * epsilon0 * omega * s0 * s0 * s0);
}

// Single-particle shift of a's frequency from a stationary partner charge.
inline double coulomb_detuning_single(const ParticleSpecies& a, double q_b, double omega_a,
                                      double s0) {
    using namespace constants;
    return a.charge * q_b / (4.0 * pi * epsilon0 * s0 * s0 * s0 * a.mass * omega_a);
}

// Resonance half width at half maximum in ordinary frequency, 2*gamma = 1/tau.
inline double resonance_hwhm(double tau_ex) { return 1.0 / (2.0 * tau_ex); }

// ---------------------------------------------------------------------------
// Trap systems for the integrator
// ---------------------------------------------------------------------------

// Both particles in one composed electrostatic potential.
class StaticPotentialTrap {
public:
    StaticPotentialTrap(const ComposedPotential* pot, const DoubleWellSpec& spec)
        : pot_(pot), q_a_(spec.species_a.charge), q_b_(spec.species_b.charge) {
        const double span = pot->z_max() - pot->z_min();
        z_min_a_ = locate_minimum(*pot, spec.z_a0, q_a_, span / 6.0);
        z_min_b_ = locate_minimum(*pot, spec.z_b0, q_b_, span / 6.0);
        phi_a_ = pot->value(z_min_a_);
        phi_b_ = pot->value(z_min_b_);
    }

    void prepare(double) {}
    double force_a(double z) const { return -q_a_ * pot_->eval(z, 1); }
    double force_b(double z) const { return -q_b_ * pot_->eval(z, 1); }
    double potential_energy_a(double z) const { return q_a_ * (pot_->value(z) - phi_a_); }
    double potential_energy_b(double z) const { return q_b_ * (pot_->value(z) - phi_b_); }
    double z_min_a() const { return z_min_a_; }
    double z_min_b() const { return z_min_b_; }
    double domain_lo() const { return 0.97 * pot_->z_min(); }
    double domain_hi() const { return 0.97 * pot_->z_max(); }
    const ComposedPotential& potential() const { return *pot_; }

private:
    const ComposedPotential* pot_;
    double q_a_, q_b_;
    double z_min_a_ = 0.0, z_min_b_ = 0.0, phi_a_ = 0.0, phi_b_ = 0.0;
};

// Ideal per-particle harmonic wells (each particle sees only its own spring);
// the Coulomb term stays exact in the integrator.
class HarmonicPairTrap {
public:
    HarmonicPairTrap(double m_a, double omega_a, double z_a0, double m_b, double omega_b,
                     double z_b0)
        : k_a_(m_a * omega_a * omega_a),
          k_b_(m_b * omega_b * omega_b),
          z_a0_(z_a0),
          z_b0_(z_b0) {}

    void prepare(double) {}
    double force_a(double z) const { return -k_a_ * (z - z_a0_); }
    double force_b(double z) const { return -k_b_ * (z - z_b0_); }
    double potential_energy_a(double z) const { return 0.5 * k_a_ * (z - z_a0_) * (z - z_a0_); }
    double potential_energy_b(double z) const { return 0.5 * k_b_ * (z - z_b0_) * (z - z_b0_); }
    double z_min_a() const { return z_a0_; }
    double z_min_b() const { return z_b0_; }
    double domain_lo() const { return -1.0; }
    double domain_hi() const { return 1.0; }

private:
    double k_a_, k_b_, z_a0_, z_b0_;
};

// ---------------------------------------------------------------------------
// Velocity-Verlet two-body integrator
// ---------------------------------------------------------------------------

struct TwoBodyParams {
    double m_a = 0.0, m_b = 0.0;
    double k_coulomb = 0.0;  // q_a q_b / (4 pi eps0), signed
    double min_separation = 1e-6;
    int update_stride = 64;
};

inline TwoBodyParams two_body_params(const DoubleWellSpec& spec, const IntegratorConfig& cfg) {
    using namespace constants;
    TwoBodyParams p;
    p.m_a = spec.species_a.mass;
    p.m_b = spec.species_b.mass;
    p.k_coulomb = spec.species_a.charge * spec.species_b.charge / (4.0 * pi * epsilon0);
    p.min_separation = cfg.collision_min_separation;
    p.update_stride = cfg.coefficient_update_stride;
    return p;
}

// Coulomb force on particle a for separation d = z_a - z_b (Newton pair).
inline double coulomb_force(double k_coulomb, double d) { return k_coulomb / (d * std::abs(d)); }

struct NullProbe {
    void operator()(std::int64_t, const TwoBodyState&) {}
};

// probe(step, state) runs every probe_stride steps (and on the final step).
template <class Trap, class Probe = NullProbe>
RunOutcome integrate_two_body(Trap& trap, const TwoBodyParams& p, TwoBodyState& st, double dt,
                              std::int64_t n_steps, Probe&& probe = NullProbe{},
                              std::int64_t probe_stride = 1) {
    const double z_lo = trap.domain_lo(), z_hi = trap.domain_hi();
    const double inv_ma = 1.0 / p.m_a, inv_mb = 1.0 / p.m_b;
    const double half_dt = 0.5 * dt;

    trap.prepare(st.t);
    double d = st.z_a - st.z_b;
    double fc = coulomb_force(p.k_coulomb, d);
    double F_a = trap.force_a(st.z_a) + fc;
    double F_b = trap.force_b(st.z_b) - fc;

    for (std::int64_t step = 1; step <= n_steps; ++step) {
        st.v_a += half_dt * F_a * inv_ma;
        st.v_b += half_dt * F_b * inv_mb;
        st.z_a += dt * st.v_a;
        st.z_b += dt * st.v_b;
        st.t += dt;

        d = st.z_a - st.z_b;
        if (std::abs(d) < p.min_separation) return RunOutcome::collision;
        if (st.z_a < z_lo || st.z_a > z_hi || st.z_b < z_lo || st.z_b > z_hi)
            return RunOutcome::escaped;

        if (p.update_stride > 0 && step % p.update_stride == 0) trap.prepare(st.t);
        fc = coulomb_force(p.k_coulomb, d);
        F_a = trap.force_a(st.z_a) + fc;
        F_b = trap.force_b(st.z_b) - fc;
        st.v_a += half_dt * F_a * inv_ma;
        st.v_b += half_dt * F_b * inv_mb;

        if (step % probe_stride == 0 || step == n_steps) probe(step, st);
    }
    return RunOutcome::completed;
}

// Single particle in the trap potential seen by species "a" (used by tests
// and the phase burn-in; no Coulomb term).
template <class Trap>
void integrate_single_a(Trap& trap, double m_a, double& z, double& v, double dt,
                        std::int64_t n_steps) {
    const double half_dt = 0.5 * dt;
    double F = trap.force_a(z);
    for (std::int64_t step = 0; step < n_steps; ++step) {
        v += half_dt * F / m_a;
        z += dt * v;
        F = trap.force_a(z);
        v += half_dt * F / m_a;
    }
}

// Per-particle energies exclude the mutual Coulomb term; E_int is referenced
// to the equilibrium separation so E_a + E_b + E_int is conserved and E = 0
// for both particles at rest at their minima.
template <class Trap>
TwoBodyEnergies two_body_energies(const Trap& trap, const TwoBodyParams& p,
                                  const TwoBodyState& st) {
    TwoBodyEnergies e;
    e.E_a = 0.5 * p.m_a * st.v_a * st.v_a + trap.potential_energy_a(st.z_a);
    e.E_b = 0.5 * p.m_b * st.v_b * st.v_b + trap.potential_energy_b(st.z_b);
    const double s_eq = std::abs(trap.z_min_a() - trap.z_min_b());
    e.E_int = p.k_coulomb / std::abs(st.z_a - st.z_b) - p.k_coulomb / s_eq;
    e.E_total = e.E_a + e.E_b + e.E_int;
    return e;
}

// ---------------------------------------------------------------------------
// Oscillation frequency at finite energy (turning-point period integral)
// ---------------------------------------------------------------------------

// U(z) is the potential energy relative to the minimum at z_min_pos.
template <class UFunc>
double anharmonic_frequency(UFunc&& U, double z_min_pos, double mass, double energy, double z_lo,
                            double z_hi) {
    if (energy <= 0.0) throw std::invalid_argument("anharmonic_frequency: energy must be > 0");
    auto turning = [&](double dir, double bound) {
        double step = dir * 1e-7;
        double prev = z_min_pos;
        double z = z_min_pos + step;
        double u_prev = 0.0;
        while ((dir > 0 && z < bound) || (dir < 0 && z > bound)) {
            const double u = U(z);
            if (u >= energy) {
                return bisect_to_level(U, prev, z, energy);
            }
            if (u < u_prev - 1e-3 * energy)
                throw UntrappedError("anharmonic_frequency: energy above barrier");
            u_prev = u;
            prev = z;
            step *= 1.4;
            z += step;
        }
        const double u_bound = U(bound);
        if (u_bound >= energy) return bisect_to_level(U, prev, bound, energy);
        throw UntrappedError("anharmonic_frequency: turning point outside domain");
    };
    const double z1 = turning(-1.0, z_lo);
    const double z2 = turning(+1.0, z_hi);

    // Period integral with z = zc + zh*sin(theta); the square-root endpoint
    // singularities become regular and the harmonic case integrates exactly.
    const double zc = 0.5 * (z1 + z2), zh = 0.5 * (z2 - z1);
    const GaussLegendre& gl = gauss_legendre_64();
    double period = 0.0;
    for (size_t i = 0; i < gl.x.size(); ++i) {
        const double th = 0.5 * constants::pi * gl.x[i];
        const double z = zc + zh * std::sin(th);
        const double ke = energy - U(z);
        const double v = std::sqrt(std::max(2.0 * ke / mass, 1e-300));
        period += gl.w[i] * (0.5 * constants::pi) * zh * std::cos(th) / v;
    }
    period *= 2.0;
    return 1.0 / period;
}

inline double axial_frequency_at_energy(const ComposedPotential& pot, const ParticleSpecies& sp,
                                        double z_min_pos, double energy) {
    const double phi0 = pot.value(z_min_pos);
    auto U = [&](double z) { return sp.charge * (pot.value(z) - phi0); };
    return anharmonic_frequency(U, z_min_pos, sp.mass, energy, 0.98 * pot.z_min(),
                                0.98 * pot.z_max());
}

}  // namespace dwsim
