#ifndef SICA_PARAMS_HPP
#define SICA_PARAMS_HPP

#include <array>

namespace sica {

using Vec4 = std::array<double, 4>;

/// Dense 4x4 matrix, row-major. Small enough that everything stays inline.
struct Mat4 {
    std::array<double, 16> m{};

    double& operator()(int r, int c) { return m[static_cast<std::size_t>(r) * 4 + c]; }
    double operator()(int r, int c) const { return m[static_cast<std::size_t>(r) * 4 + c]; }

    Mat4 transposed() const {
        Mat4 t;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    Vec4 operator*(const Vec4& v) const {
        Vec4 out{};
        for (int r = 0; r < 4; ++r) {
            double acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += (*this)(r, c) * v[c];
            out[r] = acc;
        }
        return out;
    }
};

/// Epidemiological rates and diffusion coefficients of the four-compartment
/// SICA HIV/AIDS model.
///
/// Units: recruitment in people*km^-2*day^-1, beta in (people/km^2)^-1*day^-1,
/// the per-capita rates in day^-1, eta_c/eta_a dimensionless infectiousness
/// modifiers, diffusion coefficients in km^2/day.
///
/// The composite exit rates are tied to the primitive rates:
///   xi1 = gamma + mu, xi2 = omega + mu, xi3 = rho + phi + mu.
/// `validate()` enforces nonnegativity of every field and the three
/// identities to 1e-12 absolute.
struct ModelParams {
    double recruitment = 0.0;  // Lambda
    double mu = 0.0;           // natural death rate
    double beta = 0.0;         // transmission rate
    double eta_c = 0.0;        // infectiousness modifier of C
    double eta_a = 0.0;        // infectiousness modifier of A
    double phi = 0.0;          // treatment rate I -> C
    double rho = 0.0;          // default-of-treatment rate I -> A
    double gamma = 0.0;        // AIDS treatment rate A -> I
    double omega = 0.0;        // default-of-treatment rate C -> I
    double xi1 = 0.0;          // gamma + mu
    double xi2 = 0.0;          // omega + mu
    double xi3 = 0.0;          // rho + phi + mu
    double d_s = 0.0;          // diffusion of S
    double d_i = 0.0;          // diffusion of I
    double d_c = 0.0;          // diffusion of C
    double d_a = 0.0;          // diffusion of A

    /// Baseline HIV/AIDS parameter set used by the default scenario.
    static ModelParams defaults();

    /// Recompute xi1..xi3 from the primitive rates.
    void derive_composite_rates();

    /// Throws ValidationError on a negative field or a composite-rate
    /// mismatch beyond 1e-12.
    void validate() const;

    double max_diffusion() const;

    bool operator==(const ModelParams&) const = default;
};

/// Weights and bounds of the treatment-optimization objective
///   J = int_Q a*I + (b/2) * int_Q u^2.
struct ObjectiveConfig {
    double infection_weight = 1.0;  // a >= 0
    double control_weight = 1.0;    // b > 0
    double u_max = 1.0;             // control cap, in (0, 1]
    double horizon = 25.0;          // T, days

    void validate() const;

    bool operator==(const ObjectiveConfig&) const = default;
};

/// State of one spatial point: densities of the Susceptible, Infected,
/// Chronic and AIDS compartments (people/km^2).
struct StatePoint {
    double s = 0.0;
    double i = 0.0;
    double c = 0.0;
    double a = 0.0;

    Vec4 as_vec() const { return {s, i, c, a}; }
    static StatePoint from_vec(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

    bool operator==(const StatePoint&) const = default;
};

}  // namespace sica

#endif  // SICA_PARAMS_HPP
