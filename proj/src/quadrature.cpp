#include "pathhjb/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "pathhjb/errors.hpp"

namespace pathhjb {

namespace {

// Nodes and weights for the physicists' Hermite weight exp(-x^2), computed by
// Newton iteration on the recurrence (classic gauher scheme). Adequate for the
// small node counts used here.
void hermite_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    const double pim4 = 0.7511255444649425; // pi^(-1/4)
    const int m = (n + 1) / 2;
    std::vector<double> found(static_cast<std::size_t>(m), 0.0); // descending roots
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * found[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * found[1];
        else
            z = 2.0 * z - found[static_cast<std::size_t>(i) - 2];

        double pp = 0.0;
        for (int iter = 0; iter < 64; ++iter) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15) break;
        }
        found[static_cast<std::size_t>(i)] = z;
        x[static_cast<std::size_t>(i)] = -z; // ascending order, negative half first
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
        w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
    }
    if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
}

QuadratureRule axis_product(std::span<const double> axis_nodes,
                            std::span<const double> axis_weights, int r) {
    const std::size_t k = axis_weights.size();
    QuadratureRule q;
    q.r = r;
    std::size_t total = 1;
    for (int a = 0; a < r; ++a) total *= k;
    q.nodes.reserve(total * static_cast<std::size_t>(r));
    q.weights.reserve(total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
    for (std::size_t c = 0; c < total; ++c) {
        double w = 1.0;
        for (int a = 0; a < r; ++a) {
            q.nodes.push_back(axis_nodes[idx[static_cast<std::size_t>(a)]]);
            w *= axis_weights[idx[static_cast<std::size_t>(a)]];
        }
        q.weights.push_back(w);
        for (int a = r - 1; a >= 0; --a) { // last axis fastest: lexicographic
            if (++idx[static_cast<std::size_t>(a)] < k) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
    return q;
}

} // namespace

QuadratureRule binary_quadrature(int r) {
    if (r < 1) throw ValidationError("quadrature: shock dimension must be positive");
    const double nodes[2] = {-1.0, 1.0};
    const double weights[2] = {0.5, 0.5};
    return axis_product(nodes, weights, r);
}

QuadratureRule gauss_hermite_quadrature(int n, int r) {
    if (n < 1 || n > 64) throw ValidationError("quadrature: gauss_hermite order out of range");
    if (r < 1) throw ValidationError("quadrature: shock dimension must be positive");
    std::vector<double> x, w;
    hermite_rule(n, x, w);
    // Rescale to the standard normal: xi = sqrt(2) x, weight / sqrt(pi).
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    std::vector<double> nodes(x.size()), weights(w.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        nodes[i] = std::numbers::sqrt2 * x[i];
        weights[i] = w[i] * inv_sqrt_pi;
    }
    // Symmetrize exactly so the mean condition holds to rounding.
    for (std::size_t i = 0; i < nodes.size() / 2; ++i) {
        std::size_t j = nodes.size() - 1 - i;
        double mag = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -mag;
        nodes[j] = mag;
        double ww = 0.5 * (weights[i] + weights[j]);
        weights[i] = weights[j] = ww;
    }
    if (nodes.size() % 2 == 1) nodes[nodes.size() / 2] = 0.0;
    double total = 0.0;
    for (double ww : weights) total += ww;
    for (double& ww : weights) ww /= total;
    return axis_product(nodes, weights, r);
}

void validate_quadrature(const QuadratureRule& q, double tol) {
    if (q.weights.empty() || q.nodes.size() != q.weights.size() * static_cast<std::size_t>(q.r))
        throw ValidationError("quadrature: inconsistent node/weight arrays");
    double wsum = 0.0;
    for (double w : q.weights) {
        if (!(w > 0.0) || w > 1.0) throw ValidationError("quadrature: weights must lie in (0, 1]");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > tol) throw ValidationError("quadrature: weights must sum to 1");
    for (int a = 0; a < q.r; ++a) {
        double mean = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) mean += q.weights[j] * q.node(j)[static_cast<std::size_t>(a)];
        if (std::abs(mean) > tol) throw ValidationError("quadrature: mean must vanish");
        for (int b = 0; b < q.r; ++b) {
            double cov = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j)
                cov += q.weights[j] * q.node(j)[static_cast<std::size_t>(a)] * q.node(j)[static_cast<std::size_t>(b)];
            double target = (a == b) ? 1.0 : 0.0;
            if (std::abs(cov - target) > tol)
                throw ValidationError("quadrature: covariance must equal the identity");
        }
    }
}

QuadratureRule make_quadrature(const std::string& name, int r) {
    QuadratureRule q;
    if (name == "binary") {
        q = binary_quadrature(r);
    } else if (name.rfind("gauss_hermite:", 0) == 0) {
        int n = std::stoi(name.substr(std::string("gauss_hermite:").size()));
        q = gauss_hermite_quadrature(n, r);
    } else {
        throw ValidationError("quadrature: unknown rule '" + name + "'");
    }
    validate_quadrature(q);
    return q;
}

} // namespace pathhjb
