#include "sica/model.hpp"

#include <cmath>
#include <string>

#include "sica/errors.hpp"

namespace sica {

ModelParams ModelParams::defaults() {
    ModelParams p;
    p.mu = 1.0 / 74.02;
    p.recruitment = 2.19 * p.mu;
    p.beta = 0.755;
    p.eta_c = 1.5;
    p.eta_a = 0.2;
    p.phi = 1.0;
    p.rho = 0.1;
    p.gamma = 0.33;
    p.omega = 0.09;
    p.d_s = 0.9;
    p.d_i = 0.1;
    p.d_c = 0.1;
    p.d_a = 0.1;
    p.derive_composite_rates();
    return p;
}

void ModelParams::derive_composite_rates() {
    xi1 = gamma + mu;
    xi2 = omega + mu;
    xi3 = rho + phi + mu;
}

void ModelParams::validate() const {
    const struct {
        const char* name;
        double value;
    } fields[] = {
        {"recruitment", recruitment}, {"mu", mu},       {"beta", beta},
        {"eta_c", eta_c},             {"eta_a", eta_a}, {"phi", phi},
        {"rho", rho},                 {"gamma", gamma}, {"omega", omega},
        {"xi1", xi1},                 {"xi2", xi2},     {"xi3", xi3},
        {"d_s", d_s},                 {"d_i", d_i},     {"d_c", d_c},
        {"d_a", d_a},
    };
    for (const auto& f : fields) {
        if (!(f.value >= 0.0) || !std::isfinite(f.value))
            throw ValidationError(f.name, "must be finite and >= 0, got " +
                                              std::to_string(f.value));
    }
    constexpr double tol = 1e-12;
    if (std::abs(xi1 - (gamma + mu)) > tol)
        throw ValidationError("xi1", "must equal gamma + mu within 1e-12");
    if (std::abs(xi2 - (omega + mu)) > tol)
        throw ValidationError("xi2", "must equal omega + mu within 1e-12");
    if (std::abs(xi3 - (rho + phi + mu)) > tol)
        throw ValidationError("xi3", "must equal rho + phi + mu within 1e-12");
}

double ModelParams::max_diffusion() const {
    return std::max(std::max(d_s, d_i), std::max(d_c, d_a));
}

void ObjectiveConfig::validate() const {
    // a == 0 is allowed: the degenerate no-infection-cost problem has a
    // zero-source adjoint and a zero optimal control.
    if (!(infection_weight >= 0.0) || !std::isfinite(infection_weight))
        throw ValidationError("a", "infection weight must be >= 0");
    if (!(control_weight > 0.0) || !std::isfinite(control_weight))
        throw ValidationError("b", "control weight must be > 0");
    if (!(u_max > 0.0 && u_max <= 1.0))
        throw ValidationError("u_max", "must lie in (0, 1]");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("T", "horizon must be > 0");
}

Mat4 sensitivity_matrix(const StatePoint& z, double u, const ModelParams& p,
                        JacobianMode mode) {
    const double incidence = p.beta * (z.i + p.eta_c * z.c + p.eta_a * z.a);
    Mat4 f;
    // Rows/columns ordered (S, I, C, A).
    f(0, 0) = -incidence - p.mu;
    f(1, 0) = incidence;
    f(1, 1) = -p.xi3;
    f(1, 2) = p.omega;
    f(1, 3) = p.gamma;
    f(2, 1) = p.phi;
    f(2, 2) = -p.xi2;
    f(3, 1) = p.rho;
    f(3, 3) = -p.xi1;
    if (mode == JacobianMode::full) {
        // Incidence derivatives with respect to I, C, A and the +/-u
        // treatment couplings, absent from the frozen-incidence form.
        f(0, 1) = -p.beta * z.s + u;
        f(0, 2) = -p.beta * p.eta_c * z.s;
        f(0, 3) = -p.beta * p.eta_a * z.s;
        f(1, 1) += p.beta * z.s - u;
        f(1, 2) += p.beta * p.eta_c * z.s;
        f(1, 3) += p.beta * p.eta_a * z.s;
    }
    return f;
}

}  // namespace sica
