#include "cev/sl_core.hpp"

#include <cmath>

#include "cev/error.hpp"

namespace cev {

CoefficientTriple cev_coefficients(const ModelParams& m) {
    m.validate();
    const double mu = m.mu, s2 = m.sigma * m.sigma, g = m.gamma;
    return {
        [=](double x) { return 0.5 * s2 * g * (g - 1.0) * std::pow(x, g - 2.0) - mu; },
        [=](double x) { return s2 * g * std::pow(x, g - 1.0) - mu * x; },
        [=](double x) { return 0.5 * s2 * std::pow(x, g); },
    };
}

CoefficientTriple cev_generator_coefficients(const ModelParams& m) {
    m.validate();
    const double mu = m.mu, s2 = m.sigma * m.sigma, g = m.gamma;
    return {
        [](double) { return 0.0; },
        [=](double x) { return mu * x; },
        [=](double x) { return 0.5 * s2 * std::pow(x, g); },
    };
}

NormalForm normal_form(const CoefficientTriple& c, double x_ref) {
    if (!(x_ref > 0)) raise(ErrorCode::InvalidParams, "x_ref must be > 0");
    auto ratio = [c](double x) {
        const double l2 = c.l2(x);
        if (!(l2 > 0)) raise(ErrorCode::NonIntegrableCoefficient, "l2 must be positive on the interior");
        return c.l1(x) / l2;
    };
    auto exponent = [ratio, x_ref](double x) {
        if (x == x_ref) return 0.0;
        QuadratureOptions opt;
        opt.rel_tol = 1e-14;
        opt.abs_tol = 1e-15;
        double v = 0.0;
        try {
            // Integrate in log x so that wide ranges stay cheap: dx = x du.
            auto h = [&ratio](double u) {
                const double s = std::exp(u);
                return ratio(s) * s;
            };
            v = integrate(h, std::log(x_ref), std::log(x), opt).value;
        } catch (const Error& e) {
            raise(ErrorCode::NonIntegrableCoefficient, std::string("l1/l2 integral failed: ") + e.what());
        }
        if (!std::isfinite(v)) raise(ErrorCode::NonIntegrableCoefficient, "l1/l2 integral diverges");
        return v;
    };
    NormalForm nf;
    nf.x_ref = x_ref;
    nf.w = [c, exponent](double x) { return std::exp(exponent(x)) / c.l2(x); };
    nf.Q2 = [exponent](double x) { return std::exp(exponent(x)); };
    nf.Q0 = [c, exponent](double x) { return std::exp(exponent(x)) * c.l0(x) / c.l2(x); };
    return nf;
}

double cev_weight(const DerivedParams& d, double x) {
    if (d.singular()) return std::pow(x, d.q());
    const double g = d.gamma();
    return std::exp(g * std::log(x) + d.nu() * std::pow(x, 2.0 - g));
}

double modified_wronskian(const RealFn& Q2, const Jet& f, const Jet& g, double x) {
    return Q2(x) * (f.value * g.d1 - f.d1 * g.value);
}

QuadratureResult weighted_inner(const RealFn& f, const RealFn& g, const GaussLaguerreRule& rule) {
    return rule.integrate([&](double y) { return f(y) * g(y); });
}

QuadratureResult weighted_inner(const RealFn& f, const RealFn& g, const RealFn& w, const QuadratureOptions& opt) {
    return integrate_positive_axis([&](double x) { return f(x) * g(x) * w(x); }, opt);
}

double apply_fp(const ModelParams& m, const Jet& p, double x) {
    const double s2 = m.sigma * m.sigma, g = m.gamma;
    const double xg = std::pow(x, g);
    return (0.5 * s2 * g * (g - 1.0) * xg / (x * x) - m.mu) * p.value + (s2 * g * xg / x - m.mu * x) * p.d1 +
           0.5 * s2 * xg * p.d2;
}

double apply_generator(const ModelParams& m, const Jet& f, double x) {
    return m.mu * x * f.d1 + 0.5 * m.sigma * m.sigma * std::pow(x, m.gamma) * f.d2;
}

double fp_term_scale(const ModelParams& m, const Jet& p, double x) {
    const double s2 = m.sigma * m.sigma, g = m.gamma;
    const double xg = std::pow(x, g);
    return std::abs(0.5 * s2 * g * (g - 1.0) * xg / (x * x) * p.value) + std::abs(m.mu * p.value) +
           std::abs(s2 * g * xg / x * p.d1) + std::abs(m.mu * x * p.d1) + std::abs(0.5 * s2 * xg * p.d2);
}

double generator_term_scale(const ModelParams& m, const Jet& f, double x) {
    return std::abs(m.mu * x * f.d1) + std::abs(0.5 * m.sigma * m.sigma * std::pow(x, m.gamma) * f.d2);
}

}  // namespace cev
