#pragma once

#include <span>
#include <string>
#include <vector>

namespace pathhjb {

/// Discrete quadrature for the driving shocks: nodes xi in R^r with weights
/// summing to 1, mean zero and unit covariance. Nodes are kept in shock
/// lexicographic order so reductions over children are deterministic.
struct QuadratureRule {
    int r = 1;                  ///< shock dimension
    std::vector<double> nodes;  ///< node-major, r entries per node
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    std::span<const double> node(std::size_t j) const {
        return {nodes.data() + j * static_cast<std::size_t>(r),
                static_cast<std::size_t>(r)};
    }
};

/// Symmetric two-point rule per axis, full product over r axes.
QuadratureRule binary_quadrature(int r);

/// Gauss-Hermite rule with n nodes per axis (probabilists' normalization:
/// exact moments of a standard normal up to degree 2n-1), product over r axes.
QuadratureRule gauss_hermite_quadrature(int n, int r);

/// Throws ValidationError unless sum w = 1, sum w*xi = 0 and
/// sum w*xi*xi^T = I all hold within tol.
void validate_quadrature(const QuadratureRule& q, double tol = 1e-12);

/// Parses "binary" or "gauss_hermite:<n>".
QuadratureRule make_quadrature(const std::string& name, int r);

} // namespace pathhjb
