#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace cev {

using RealFn = std::function<double(double)>;

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    int max_intervals = 4000;
    bool throw_on_failure = true;
};

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval.
QuadratureResult integrate(const RealFn& f, double lo, double hi, const QuadratureOptions& opt = {});

/// Integral over [lo, inf) through x = lo + scale*t/(1-t).
QuadratureResult integrate_to_infinity(const RealFn& f, double lo, const QuadratureOptions& opt = {},
                                       double scale = 1.0);

/// Integral over (0, inf) in the log variable x = e^u, split at x = pivot.
/// Suited to integrands with power-law behaviour at both ends.
QuadratureResult integrate_positive_axis(const RealFn& f, const QuadratureOptions& opt = {},
                                         double pivot = 1.0);

/// Integral over [pts.front(), pts.back()] (or to infinity when open_tail) with
/// the interior points as forced breakpoints.
QuadratureResult integrate_breakpoints(const RealFn& f, const std::vector<double>& pts, bool open_tail,
                                       const QuadratureOptions& opt = {}, double tail_scale = 1.0);

/// Generalized Gauss-Laguerre rule for integrals against y^alpha e^{-y} on (0, inf).
/// Carries an embedded coarser rule (half the nodes) for an error estimate.
class GaussLaguerreRule {
public:
    GaussLaguerreRule(int n, double alpha);

    int size() const { return static_cast<int>(nodes_.size()); }
    double alpha() const { return alpha_; }
    const Eigen::VectorXd& nodes() const { return nodes_; }
    const Eigen::VectorXd& weights() const { return weights_; }

    QuadratureResult integrate(const RealFn& f) const;

private:
    double alpha_;
    Eigen::VectorXd nodes_, weights_;
    Eigen::VectorXd coarse_nodes_, coarse_weights_;
};

/// Nodes and weights of the n-point generalized Gauss-Laguerre rule.
/// Golub-Welsch eigenvalues, Newton-polished, closed-form Christoffel weights.
void gauss_laguerre_nodes(int n, double alpha, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// n-point Gauss-Legendre on [-1, 1].
void gauss_legendre_nodes(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace cev
