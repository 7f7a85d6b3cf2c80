#pragma once

#include <functional>

#include "cev/params.hpp"
#include "cev/quadrature.hpp"

namespace cev {

/// Value and first two derivatives of a function at a point.
struct Jet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

using JetFn = std::function<Jet(double)>;

/// Operator l2 p'' + l1 p' + l0 p.
struct CoefficientTriple {
    RealFn l0, l1, l2;
};

/// (1/w)[(Q2 p')' + Q0 p] representation of a CoefficientTriple.
struct NormalForm {
    RealFn w, Q0, Q2;
    double x_ref = 1.0;
};

NormalForm normal_form(const CoefficientTriple& c, double x_ref);

/// Coefficients of the CEV Fokker-Planck operator L_gamma.
CoefficientTriple cev_coefficients(const ModelParams& m);

/// Coefficients of the CEV generator G_gamma.
CoefficientTriple cev_generator_coefficients(const ModelParams& m);

/// w_gamma(x) = x^gamma exp(nu x^{2-gamma}), or x^q at gamma = 2.
double cev_weight(const DerivedParams& d, double x);

/// Q2(x) [f g' - f' g](x).
double modified_wronskian(const RealFn& Q2, const Jet& f, const Jet& g, double x);

/// Inner product against the rule's built-in weight y^alpha e^{-y}.
QuadratureResult weighted_inner(const RealFn& f, const RealFn& g, const GaussLaguerreRule& rule);

/// Inner product against an explicit weight on (0, inf), adaptive in log x.
QuadratureResult weighted_inner(const RealFn& f, const RealFn& g, const RealFn& w,
                                const QuadratureOptions& opt = {});

/// L_gamma[p](x).
double apply_fp(const ModelParams& m, const Jet& p, double x);

/// G_gamma[f](x) = mu x f' + sigma^2/2 x^gamma f''.
double apply_generator(const ModelParams& m, const Jet& f, double x);

/// Sum of the absolute values of the three terms of L_gamma[p](x); the natural
/// scale for relative residuals of a pointwise operator identity.
double fp_term_scale(const ModelParams& m, const Jet& p, double x);
double generator_term_scale(const ModelParams& m, const Jet& f, double x);

}  // namespace cev
