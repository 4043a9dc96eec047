#ifndef SICA_CHECKS_HPP
#define SICA_CHECKS_HPP

#include <string>
#include <vector>

#include "sica/scenario.hpp"

namespace sica {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Desk-scale verification suite behind the `validate` CLI command:
/// stencil exactness, quadrature conservation and self-adjointness,
/// stencil convergence order, the well-mixed reduction against the RK4
/// reference, the total-population law, growth-bound invariants, and an
/// adjoint-vs-finite-difference gradient probe. Model parameters are taken
/// from `cfg`; grid/time sizes are fixed per check.
std::vector<CheckResult> run_validation_checks(const ScenarioConfig& cfg);

}  // namespace sica

#endif  // SICA_CHECKS_HPP
