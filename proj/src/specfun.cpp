#include "cev/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cev/error.hpp"
#include "cev/quadrature.hpp"

namespace cev {

namespace {

constexpr double kPi = std::numbers::pi;

double switch_point(double Lambda, double b) { return std::max(30.0, 2.0 * std::abs(Lambda) + std::abs(b)); }

// 1F1 power series; terminates by itself when Lambda is a non-positive integer.
double phi_series(double A, double b, double y) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 100000; ++k) {
        term *= (A + k) / (b + k) * y / (k + 1);
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) < 1e-17 * std::abs(sum) && (A + k) > 0.0 && k > y) return sum;
    }
    raise(ErrorCode::NonConvergent, "Kummer series did not converge");
}

// Leading large-y expansion Gamma(b)/Gamma(A) e^y y^{A-b} sum (b-A)_k (1-A)_k / (k! y^k).
bool phi_asymptotic(double A, double b, double y, double& out) {
    double term = 1.0, sum = 1.0, prev = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int k = 0; k < 200; ++k) {
        term *= (b - A + k) * (1.0 - A + k) / ((k + 1) * y);
        if (std::abs(term) < 1e-16 * std::abs(sum)) {
            sum += term;
            converged = true;
            break;
        }
        if (std::abs(term) > prev) break;
        prev = std::abs(term);
        sum += term;
    }
    if (!converged) return false;
    const auto gb = log_gamma(b), ga = log_gamma(A);
    out = gb.sign * ga.sign * sum * std::exp(gb.log_abs - ga.log_abs + y + (A - b) * std::log(y));
    return true;
}

// U(-n, b, y) = (-1)^n sum_k C(n,k) (b+k)_{n-k} (-y)^k.
double psi_polynomial(int n, double b, double y) {
    double sum = 0.0, binom = 1.0, ypow = 1.0;
    for (int k = 0; k <= n; ++k) {
        sum += binom * pochhammer(b + k, n - k) * ypow;
        binom *= static_cast<double>(n - k) / (k + 1);
        ypow *= -y;
    }
    return (n % 2 == 0) ? sum : -sum;
}

// y^{-A} sum (A)_k (A-b+1)_k / k! (-y)^{-k}, accepted only when the smallest term is negligible.
bool psi_asymptotic(double A, double b, double y, double& out) {
    double term = 1.0, sum = 1.0, prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 300; ++k) {
        term *= -(A + k) * (A - b + 1.0 + k) / ((k + 1) * y);
        if (std::abs(term) <= 1e-16 * std::abs(sum)) {
            sum += term;
            out = sum * std::pow(y, -A);
            return true;
        }
        if (std::abs(term) > prev) return false;
        prev = std::abs(term);
        sum += term;
    }
    return false;
}

// First piece [0, c] of int t^{A-1} g(t) dt; for A < 1 the substitution u = t^A removes the endpoint singularity.
double lower_piece(const std::function<double(double)>& log_rest, double A, double c, double shift) {
    QuadratureOptions opt;
    opt.rel_tol = 1e-14;
    if (A < 1.0) {
        const double uc = std::pow(c, A);
        auto g = [&](double u) {
            if (u <= 0.0) return 0.0;
            const double t = std::pow(u, 1.0 / A);
            return std::exp(log_rest(t) - shift);
        };
        return integrate(g, 0.0, uc, opt).value / A;
    }
    auto g = [&](double t) {
        if (t <= 0.0) return A == 1.0 ? std::exp(log_rest(0.0) - shift) : 0.0;
        return std::exp((A - 1.0) * std::log(t) + log_rest(t) - shift);
    };
    return integrate(g, 0.0, c, opt).value;
}

// U(A, b, y) for A > 0 from its Laplace-type integral representation.
double psi_integral(double A, double b, double y) {
    QuadratureOptions opt;
    opt.rel_tol = 1e-14;
    if (b >= 1.0) {
        // U = y^{1-b}/Gamma(A) int_0^inf e^{-s} s^{A-1} (y+s)^{b-A-1} ds
        const double p = b - A - 1.0;
        auto log_rest = [y, p](double s) { return -s + p * std::log(y + s); };
        auto log_full = [&](double s) { return (A - 1.0) * std::log(s) + log_rest(s); };
        double shift = -std::numeric_limits<double>::infinity();
        for (double s : {std::min(y, 1.0), 1.0, std::max(1.0, b - 2.0), std::max(1.0, A)}) shift = std::max(shift, log_full(s));
        const double c = std::min(y, 1.0);
        double total = lower_piece(log_rest, A, c, shift);
        auto full = [&](double s) { return std::exp(log_full(s) - shift); };
        if (c < 1.0) total += integrate(full, c, 1.0, opt).value;
        total += integrate_to_infinity(full, 1.0, opt, std::max(1.0, b)).value;
        return total * std::exp(shift + (1.0 - b) * std::log(y) - std::lgamma(A));
    }
    // b < 1: U = 1/Gamma(A) int_0^inf e^{-yt} t^{A-1} (1+t)^{b-A-1} dt
    const double p = b - A - 1.0;
    auto log_rest = [y, p](double t) { return -y * t + p * std::log1p(t); };
    auto log_full = [&](double t) { return (A - 1.0) * std::log(t) + log_rest(t); };
    double shift = log_full(1.0);
    double total = lower_piece(log_rest, A, 1.0, shift);
    auto full = [&](double t) { return std::exp(log_full(t) - shift); };
    const double scale = std::max(1.0, 1.0 / y);
    total += integrate_to_infinity(full, 1.0, opt, scale).value;
    return total * std::exp(shift - std::lgamma(A));
}

double psi_general(double A, double b, double y) {
    if (A > 0.0) return psi_integral(A, b, y);
    const double A2 = A - b + 1.0;
    if (A2 > 0.0) return std::pow(y, 1.0 - b) * psi_integral(A2, 2.0 - b, y);
    // Downward recurrence U(c-1) = -(b-2c-y)U(c) - c(c-b+1)U(c+1) from c in (0,1]; stable for decreasing c.
    const int m = static_cast<int>(std::floor(-A)) + 1;
    double c = A + m;
    double u_c = psi_integral(c, b, y), u_next = psi_integral(c + 1.0, b, y);
    for (int i = 0; i < m; ++i) {
        const double u_prev = -(b - 2.0 * c - y) * u_c - c * (c - b + 1.0) * u_next;
        u_next = u_c;
        u_c = u_prev;
        c -= 1.0;
    }
    return u_c;
}

}  // namespace

double SignedLogGamma::value() const { return sign * std::exp(log_abs); }

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

SignedLogGamma log_gamma(double x) {
    if (is_nonpositive_integer(x))
        raise(ErrorCode::PoleAtNonPositiveInteger, "Gamma has a pole at " + std::to_string(x));
    if (!std::isfinite(x)) raise(ErrorCode::InvalidParams, "log_gamma of a non-finite argument");
    int sign = 1;
    if (x < 0.0 && static_cast<long long>(std::floor(x)) % 2 != 0) sign = -1;
    if (x < 0.0) {
        // Reflection keeps full relative accuracy for negative arguments.
        const double s = std::sin(kPi * (x - std::floor(x)));
        return {std::log(kPi) - std::log(std::abs(s)) - std::lgamma(1.0 - x), sign};
    }
    return {std::lgamma(x), sign};
}

double reciprocal_gamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    const auto lg = log_gamma(x);
    return lg.sign * std::exp(-lg.log_abs);
}

double digamma(double x) {
    if (is_nonpositive_integer(x)) raise(ErrorCode::PoleAtNonPositiveInteger, "digamma pole");
    if (x < 0.5) return digamma(1.0 - x) - kPi / std::tan(kPi * x);
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    const double series =
        f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f * (1.0 / 132 - f * (691.0 / 32760 - f / 12))))));
    return acc + std::log(x) - 0.5 / x - series;
}

double pochhammer(double x, int k) {
    double p = 1.0;
    for (int j = 0; j < k; ++j) p *= x + j;
    return p;
}

double laguerre(int n, double a, double y) {
    if (n < 0) return 0.0;
    if (n == 0) return 1.0;
    double prev = 1.0, cur = 1.0 + a - y;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + a - y) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double laguerre_deriv(int n, double a, double y, int order) {
    if (order > n) return 0.0;
    const double v = laguerre(n - order, a + order, y);
    return (order % 2 == 0) ? v : -v;
}

Eigen::VectorXd laguerre_coefficients(int n, double a) {
    Eigen::VectorXd c(n + 1);
    for (int k = 0; k <= n; ++k) {
        // (-1)^k (a+k+1)_{n-k} / ((n-k)! k!)
        double v = pochhammer(a + k + 1.0, n - k) / (std::tgamma(n - k + 1.0) * std::tgamma(k + 1.0));
        c[k] = (k % 2 == 0) ? v : -v;
    }
    return c;
}

double kummer_phi(double Lambda, double b, double y) {
    if (is_nonpositive_integer(b)) raise(ErrorCode::ParameterPole, "b");
    if (y == 0.0) return 1.0;
    if (Lambda == b) return std::exp(y);
    if (y < 0.0) return std::exp(y) * kummer_phi(b - Lambda, b, -y);
    if (is_nonpositive_integer(Lambda) || y <= switch_point(Lambda, b)) return phi_series(Lambda, b, y);
    double out = 0.0;
    if (phi_asymptotic(Lambda, b, y, out)) return out;
    if (y < 700.0) return phi_series(Lambda, b, y);
    raise(ErrorCode::NonConvergent, "Kummer Phi: neither expansion converges");
}

double kummer_phi_deriv(double Lambda, double b, double y, int order) {
    if (is_nonpositive_integer(b)) raise(ErrorCode::ParameterPole, "b");
    double coef = 1.0;
    for (int j = 0; j < order; ++j) coef *= (Lambda + j) / (b + j);
    if (coef == 0.0) return 0.0;
    return coef * kummer_phi(Lambda + order, b + order, y);
}

double tricomi_psi(double Lambda, double b, double y) {
    if (!(y >= 0.0)) raise(ErrorCode::InvalidParams, "Psi requires y >= 0");
    if (y == 0.0) {
        if (b < 1.0) return std::tgamma(1.0 - b) * reciprocal_gamma(Lambda - b + 1.0);
        raise(ErrorCode::ArgumentZero, "Psi is singular at y = 0 for b >= 1");
    }
    if (is_nonpositive_integer(Lambda)) return psi_polynomial(static_cast<int>(-Lambda), b, y);
    const double A2 = Lambda - b + 1.0;
    if (is_nonpositive_integer(A2)) return std::pow(y, 1.0 - b) * psi_polynomial(static_cast<int>(-A2), 2.0 - b, y);
    if (y >= switch_point(Lambda, b)) {
        double out = 0.0;
        if (psi_asymptotic(Lambda, b, y, out)) return out;
    }
    return psi_general(Lambda, b, y);
}

double tricomi_psi_deriv(double Lambda, double b, double y, int order) {
    const double coef = pochhammer(Lambda, order);
    if (coef == 0.0) return 0.0;
    const double v = coef * tricomi_psi(Lambda + order, b + order, y);
    return (order % 2 == 0) ? v : -v;
}

double tricomi_psi_connection(double Lambda, double b, double y) {
    if (b == std::floor(b)) raise(ErrorCode::ParameterPole, "b (integer b in the connection formula)");
    if (!(y > 0.0)) raise(ErrorCode::ArgumentZero, "connection formula needs y > 0");
    const double c1 = std::tgamma(1.0 - b) * reciprocal_gamma(Lambda - b + 1.0);
    const double c2 = std::tgamma(b - 1.0) * reciprocal_gamma(Lambda);
    double total = 0.0;
    if (c1 != 0.0) total += c1 * kummer_phi(Lambda, b, y);
    if (c2 != 0.0) total += c2 * std::pow(y, 1.0 - b) * kummer_phi(Lambda - b + 1.0, 2.0 - b, y);
    return total;
}

double weyl_m(double a, double Lambda) {
    if (is_nonpositive_integer(Lambda)) raise(ErrorCode::ParameterPole, "Lambda");
    if (is_nonpositive_integer(1.0 + a)) raise(ErrorCode::ParameterPole, "1+a");
    if (is_nonpositive_integer(-a)) raise(ErrorCode::ParameterPole, "-a");
    if (is_nonpositive_integer(Lambda - a)) return 0.0;
    const auto g1 = log_gamma(Lambda), g2 = log_gamma(-a), g3 = log_gamma(Lambda - a), g4 = log_gamma(1.0 + a);
    const int sign = g1.sign * g2.sign * g3.sign * g4.sign;
    return -sign * std::exp(g1.log_abs + g2.log_abs - g3.log_abs - g4.log_abs);
}

double weyl_m_deriv(double a, double Lambda) {
    if (is_nonpositive_integer(Lambda - a)) {
        // m = C / Gamma(Lambda - a) with d(1/Gamma)/dz = (-1)^n n! at z = -n.
        const int n = static_cast<int>(-(Lambda - a));
        const double c = -log_gamma(Lambda).value() * log_gamma(-a).value() / log_gamma(1.0 + a).value();
        return c * ((n % 2 == 0) ? 1.0 : -1.0) * std::tgamma(n + 1.0);
    }
    return weyl_m(a, Lambda) * (digamma(Lambda) - digamma(Lambda - a));
}

}  // namespace cev
