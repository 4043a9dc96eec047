#ifndef SICA_MODEL_HPP
#define SICA_MODEL_HPP

#include "sica/params.hpp"

namespace sica {

/// Which linearization of the reaction kinetics to use.
///
/// `full` is the exact Jacobian dg/dz, including the incidence derivatives
/// (-beta*S terms) and the +/-u control couplings; it is what adjoint-based
/// gradients require. `frozen_incidence` treats the incidence coefficient
/// beta*(I + eta_c*C + eta_a*A) as a constant field and drops the control
/// couplings, which yields a sparser matrix that is occasionally useful for
/// cross-checking the sensitivity structure.
enum class JacobianMode { full, frozen_incidence };

/// Reaction kinetics g(z, u) of the four compartments at one point
/// (people*km^-2*day^-1). `u` is the local treatment intensity in [0, 1];
/// treatment moves individuals from I back to S at rate u*I.
inline Vec4 reaction_terms(const StatePoint& z, double u, const ModelParams& p) {
    const double incidence = p.beta * (z.i + p.eta_c * z.c + p.eta_a * z.a);
    return {
        -incidence * z.s - p.mu * z.s + p.recruitment + u * z.i,
        incidence * z.s - p.xi3 * z.i + p.gamma * z.a + p.omega * z.c - u * z.i,
        p.phi * z.i - p.xi2 * z.c,
        p.rho * z.i - p.xi1 * z.a,
    };
}

/// Linearization of the reaction kinetics around (z, u), per JacobianMode.
/// Entries are rates (day^-1).
Mat4 sensitivity_matrix(const StatePoint& z, double u, const ModelParams& p,
                        JacobianMode mode);

/// Control-to-state coupling vector (-I, I, 0, 0) (people/km^2). Note this
/// is the negated control derivative of the kinetics: dg/du = (I, -I, 0, 0).
inline Vec4 control_coupling(const StatePoint& z) {
    return {-z.i, z.i, 0.0, 0.0};
}

/// Source vector of the adjoint system: the infection weight enters only
/// the I row, giving (0, a, 0, 0).
inline Vec4 adjoint_source(const ObjectiveConfig& cfg) {
    return {0.0, cfg.infection_weight, 0.0, 0.0};
}

}  // namespace sica

#endif  // SICA_MODEL_HPP
