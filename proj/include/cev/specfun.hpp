#pragma once

#include <Eigen/Dense>

namespace cev {

struct SignedLogGamma {
    double log_abs;  ///< log |Gamma(x)|
    int sign;        ///< sign of Gamma(x)
    double value() const;
};

/// log |Gamma(x)| with sign; throws PoleAtNonPositiveInteger at x in {0, -1, ...}.
SignedLogGamma log_gamma(double x);

/// 1/Gamma(x), exactly 0 at the poles.
double reciprocal_gamma(double x);

double digamma(double x);

/// Rising factorial (x)_k.
double pochhammer(double x, int k);

bool is_nonpositive_integer(double x);

/// Generalized Laguerre polynomial L_n^a(y) by the three-term recurrence.
double laguerre(int n, double a, double y);

/// k-th derivative d^k/dy^k L_n^a(y) = (-1)^k L_{n-k}^{a+k}(y).
double laguerre_deriv(int n, double a, double y, int order = 1);

/// Monomial coefficients c_k of L_n^a(y) = sum_k c_k y^k.
Eigen::VectorXd laguerre_coefficients(int n, double a);

struct KummerParams {
    double Lambda;
    double b;
    double y;
};

/// Kummer's regular solution Phi(Lambda, b, y) = 1F1(Lambda; b; y).
double kummer_phi(double Lambda, double b, double y);
inline double kummer_phi(const KummerParams& p) { return kummer_phi(p.Lambda, p.b, p.y); }

/// k-th y-derivative of Phi: (Lambda)_k/(b)_k Phi(Lambda+k, b+k, y).
double kummer_phi_deriv(double Lambda, double b, double y, int order = 1);

/// Tricomi's solution Psi(Lambda, b, y) = U(Lambda, b, y), y >= 0.
double tricomi_psi(double Lambda, double b, double y);
inline double tricomi_psi(const KummerParams& p) { return tricomi_psi(p.Lambda, p.b, p.y); }

/// k-th y-derivative of Psi: (-1)^k (Lambda)_k Psi(Lambda+k, b+k, y).
double tricomi_psi_deriv(double Lambda, double b, double y, int order = 1);

/// Psi through the two-Phi connection formula; ParameterPole at integer b.
double tricomi_psi_connection(double Lambda, double b, double y);

/// Weyl function m_a(Lambda) = -Gamma(Lambda)Gamma(-a)/(Gamma(Lambda-a)Gamma(1+a)).
/// Exactly 0 when Lambda - a is a non-positive integer; ParameterPole naming the
/// argument when Lambda, 1+a or -a is one.
double weyl_m(double a, double Lambda);

/// d m_a / d Lambda.
double weyl_m_deriv(double a, double Lambda);

}  // namespace cev
