#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pathhjb/coefficients.hpp"
#include "pathhjb/path.hpp"

namespace pathhjb {

/// Smooth test function of cylindrical form
///   phi(t, omega) = g(t, omega(t1 ^ t), ..., omega(tq ^ t)),
/// with anchor times t1 < ... < tq. Reading anchors through the stopped path
/// makes phi non-anticipative by construction. Partials of g are supplied in
/// closed form; tests cross-check them against finite differences.
struct CylindricalTestFunction {
    std::vector<double> anchor_times; ///< ascending, within [0, T]
    int dim = 1;                      ///< state dimension d

    // args: q*d entries, anchor-major
    std::function<double(double, std::span<const double>)> g;
    std::function<double(double, std::span<const double>)> g_t;
    std::function<void(double, std::span<const double>, double*)> g_grad; ///< q*d out
    std::function<void(double, std::span<const double>, double*)> g_hess; ///< (q*d)^2 out, row-major

    double poly_C = 1.0; ///< growth certificate constants
    double poly_q = 2.0;

    std::string name;

    std::size_t args() const { return anchor_times.size() * static_cast<std::size_t>(dim); }
};

/// phi evaluated at (t, omega).
double phi_value(const CylindricalTestFunction& phi, const TimedPath& at);

/// Time-advance derivative with the path held frozen at t. For cylindrical
/// functions every path argument is constant under the horizontal move, so
/// only the explicit time dependence of g survives.
double horizontal_derivative(const CylindricalTestFunction& phi, const TimedPath& at);

/// Derivative of h -> phi(t, omega + h e_i 1_[t,T]) at h = 0. Anchors at or
/// after t move with the bump; earlier anchors are untouched.
void vertical_gradient(const CylindricalTestFunction& phi, const TimedPath& at, double* out_d);
void vertical_hessian(const CylindricalTestFunction& phi, const TimedPath& at, double* out_dxd);

/// Result of maximizing the generator over the action grid.
struct GEvaluation {
    double value = 0.0;
    ControlPoint argmax_control;
    double gap_certificate = 0.0; ///< |value(res) - value(2*res - 1)|
};

/// max over the action grid of <grad, b(f,t,omega)> + 1/2 tr[hess sigma sigma^*].
/// Ties break to the lowest lexicographic grid index. The certificate comes
/// from one nested refinement of the grid.
GEvaluation evaluate_G(const CoefficientField& c, const TimedPath& at,
                       std::span<const double> grad, std::span<const double> hess,
                       int grid_res);

/// Closed-form value for interval-bound families with d = 1:
/// max(g*b_lo, g*b_hi) + 0.5*max(h*a_lo, h*a_hi).
double bang_bang_value(const CoefficientField& c, const TimedPath& at, double grad,
                       double hess);

/// horizontal_derivative + evaluate_G at the vertical gradient and Hessian;
/// the sign of this quantity is what sub/supersolution tests inspect.
double ppde_residual(const CoefficientField& c, const CylindricalTestFunction& phi,
                     const TimedPath& at, int grid_res = 9);

// Built-in test functions (d = 1 unless stated). Used by the property suites
// and the residual probes.
CylindricalTestFunction test_fn_time();                        // g = t
CylindricalTestFunction test_fn_anchor(double anchor);         // g = x
CylindricalTestFunction test_fn_time_times_anchor(double anchor); // g = t*x
CylindricalTestFunction test_fn_square(double anchor);         // g = x^2
CylindricalTestFunction test_fn_heat(double a, double T);      // g = x^2 + a*(T - t)
CylindricalTestFunction test_fn_product(double t1, double t2); // g = x1*x2
CylindricalTestFunction test_fn_sin(double anchor, double freq);
/// Random polynomial of degree <= 3 in q anchors with a time factor.
CylindricalTestFunction test_fn_random(std::uint64_t seed, int q, double T);

} // namespace pathhjb
