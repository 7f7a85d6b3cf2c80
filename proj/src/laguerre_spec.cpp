#include "cev/laguerre_spec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cev/error.hpp"
#include "cev/specfun.hpp"

namespace cev {

Extension Extension::finite(double theta) {
    if (!std::isfinite(theta)) raise(ErrorCode::InvalidParams, "finite theta must be a finite real");
    Extension e;
    e.theta_ = theta;
    return e;
}

double Extension::theta() const {
    if (!theta_) raise(ErrorCode::InvalidParams, "theta is infinite");
    return *theta_;
}

std::string Extension::to_string() const {
    if (!theta_) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << *theta_;
    return os.str();
}

namespace {

bool is_integer(double v) { return v == std::floor(v); }

double m_minus(double a, double theta, double Lambda) { return weyl_m(a, Lambda) - theta; }

double polish_root(double a, double theta, double lo, double hi, double flo) {
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double fm = m_minus(a, theta, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    const double fx = m_minus(a, theta, x);
    const double d = weyl_m_deriv(a, x);
    if (d != 0.0 && std::isfinite(d)) {
        const double xn = x - fx / d;
        if (xn >= lo && xn <= hi && std::abs(m_minus(a, theta, xn)) < std::abs(fx)) x = xn;
    }
    return x;
}

std::vector<double> segment_samples(double L, double R, bool left_pole, bool right_pole) {
    constexpr int N = 400;
    std::vector<double> s;
    s.reserve(N + 40);
    const double w = R - L;
    for (int i = 0; i <= N; ++i) {
        if ((i == 0 && left_pole) || (i == N && right_pole)) continue;
        s.push_back(L + w * 0.5 * (1.0 - std::cos(M_PI * i / N)));
    }
    for (int j = 2; j <= 14; ++j) {
        const double off = w * std::pow(10.0, -j);
        if (left_pole) s.push_back(L + off);
        if (right_pole) s.push_back(R - off);
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    s.erase(std::remove_if(s.begin(), s.end(),
                           [&](double v) { return (left_pole && v <= L) || (right_pole && v >= R); }),
            s.end());
    return s;
}

}  // namespace

LaguerreSpectrum weyl_roots(double a, double theta, double lo, double hi) {
    if (!(hi > lo)) raise(ErrorCode::InvalidParams, "empty spectrum window");
    LaguerreSpectrum out;
    std::vector<double> cuts{lo};
    for (double p = std::min(0.0, std::floor(hi)); p > lo; p -= 1.0) {
        if (p < hi) {
            out.poles_in_window.push_back(p);
            cuts.push_back(p);
        }
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    std::sort(out.poles_in_window.begin(), out.poles_in_window.end(), std::greater<>());
    auto is_pole = [](double v) { return is_nonpositive_integer(v); };
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double L = cuts[k], R = cuts[k + 1];
        const auto grid = segment_samples(L, R, is_pole(L), is_pole(R));
        double prev_x = 0, prev_f = 0;
        bool have_prev = false;
        for (double x : grid) {
            const double f = m_minus(a, theta, x);
            if (f == 0.0) {
                if (x <= lo || x >= hi) continue;
                out.points.push_back({x, std::nullopt, SpectralSource::WeylRoot, 0.0});
                ++out.sign_changes;
                have_prev = false;
                continue;
            }
            if (have_prev && (f < 0) != (prev_f < 0)) {
                ++out.sign_changes;
                const double root = polish_root(a, theta, prev_x, x, prev_f);
                out.points.push_back(
                    {root, std::nullopt, SpectralSource::WeylRoot, std::abs(m_minus(a, theta, root))});
            }
            prev_x = x;
            prev_f = f;
            have_prev = true;
        }
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const SpectralPoint& p, const SpectralPoint& q) { return p.value > q.value; });
    return out;
}

LaguerreSpectrum laguerre_spectrum(double a, const Extension& ext, const SpectrumWindow& window) {
    if (!window.range && !window.count) raise(ErrorCode::InvalidParams, "spectrum window needs a range or a count");
    if (window.count && *window.count < 0) raise(ErrorCode::InvalidParams, "count must be >= 0");
    if (ext.is_infinite()) {
        LaguerreSpectrum out;
        int n_lo = 0, n_hi = window.count ? *window.count - 1 : 0;
        if (window.range) {
            auto [lo, hi] = *window.range;
            n_lo = std::max(0, static_cast<int>(std::ceil(-hi)));
            const int top = static_cast<int>(std::floor(-lo));
            n_hi = window.count ? std::min(top, n_lo + *window.count - 1) : top;
        }
        for (int n = n_lo; n <= n_hi; ++n)
            out.points.push_back({n == 0 ? 0.0 : -static_cast<double>(n), n, SpectralSource::ExplicitPolynomialBranch, 0.0});
        return out;
    }
    if (a >= 1.0)
        raise(ErrorCode::ExtensionNotApplicable, "finite theta needs a < 1 (both endpoints are limit point for a >= 1)");
    if (is_integer(a))
        raise(ErrorCode::ExtensionNotApplicable, "finite theta is not defined at integer a (Kummer solutions degenerate)");
    const double theta = ext.theta();
    double lo, hi;
    if (window.range) {
        std::tie(lo, hi) = *window.range;
    } else {
        lo = -(*window.count + 2.0);
        hi = 64.0;
        // Push hi out until no root can lie beyond it (m_a is monotone for large Lambda).
        for (int k = 0; k < 40; ++k) {
            const double m = weyl_m(a, hi);
            const bool beyond = (a > 0) ? (m > theta) : (theta == 0.0 || std::abs(m) < 0.5 * std::abs(theta));
            if (beyond) break;
            hi *= 2.0;
        }
    }
    auto out = weyl_roots(a, theta, lo, hi);
    if (window.count && static_cast<int>(out.points.size()) > *window.count) out.points.resize(*window.count);
    return out;
}

BoundaryLimit extrapolate_limit(const std::vector<double>& seq, double tol) {
    BoundaryLimit res;
    res.sequence = seq;
    if (seq.empty()) raise(ErrorCode::NoConvergence, "empty sequence");
    for (double v : seq)
        if (!std::isfinite(v)) raise(ErrorCode::NoConvergence, "non-finite boundary sequence");
    const std::size_t K = seq.size();
    if (K >= 6) {
        const double d_last = std::abs(seq[K - 1] - seq[K - 2]);
        const double d_prev = std::abs(seq[K - 2] - seq[K - 3]);
        const double d_prev2 = std::abs(seq[K - 3] - seq[K - 4]);
        if (d_last > 1.05 * d_prev && d_prev > 1.05 * d_prev2 &&
            std::abs(seq[K - 1]) > 1e3 * (1.0 + std::abs(seq[K / 2])))
            raise(ErrorCode::NoConvergence, "boundary sequence grows without bound");
    }
    std::vector<double> level = seq;
    double best_val = seq.back();
    double best_err = K >= 2 ? std::abs(seq[K - 1] - seq[K - 2]) : std::numeric_limits<double>::infinity();
    for (int lev = 0; lev < 3 && level.size() >= 3; ++lev) {
        std::vector<double> next;
        for (std::size_t i = 0; i + 2 < level.size(); ++i) {
            const double d1 = level[i + 1] - level[i], d2 = level[i + 2] - level[i + 1];
            const double den = d2 - d1;
            const double scale = std::abs(level[i + 2]) + std::abs(d2) + 1e-300;
            if (std::abs(den) < 1e-13 * scale) next.push_back(level[i + 2]);
            else next.push_back(level[i + 2] - d2 * d2 / den);
        }
        level = std::move(next);
        if (level.size() >= 2) {
            const double err = std::abs(level.back() - level[level.size() - 2]);
            if (err < best_err) {
                best_err = err;
                best_val = level.back();
            }
        }
    }
    res.value = best_val;
    res.error = best_err;
    res.converged = best_err <= tol * std::max(1.0, std::abs(best_val));
    return res;
}

double boundary_B0_term(double a, const SmoothTail& f, double y) {
    if (a > -1.0 && a < 1.0) return std::pow(y, a + 1.0) * f(1, y);
    if (a < -1.0 && !is_integer(a)) {
        const int n = static_cast<int>(std::floor(-a));
        const double c = std::tgamma(a + 1.0) / std::tgamma(a + n + 1.0);
        return ((n % 2 == 0) ? c : -c) * std::pow(y, a + n + 1.0) * f(n + 1, y);
    }
    raise(ErrorCode::CaseUncovered, "B0 is not defined for a = " + std::to_string(a));
}

double boundary_B1_term(double a, const SmoothTail& f, double y) {
    if (a > 0.0 && a < 1.0) return f(0, y) + (y / a) * f(1, y);
    if (a < 0.0 && !is_integer(a)) return f(0, y);
    raise(ErrorCode::CaseUncovered, "B1 is not defined for a = " + std::to_string(a));
}

namespace {

template <class Term>
BoundaryLimit limit_of(Term term, const LimitOptions& opt) {
    std::vector<double> seq;
    seq.reserve(opt.levels + 1);
    double y = opt.y0;
    for (int k = 0; k <= opt.levels; ++k, y *= 0.5) seq.push_back(term(y));
    return extrapolate_limit(seq, opt.tol);
}

}  // namespace

BoundaryLimit boundary_B0(double a, const SmoothTail& f, const LimitOptions& opt) {
    return limit_of([&](double y) { return boundary_B0_term(a, f, y); }, opt);
}

BoundaryLimit boundary_B1(double a, const SmoothTail& f, const LimitOptions& opt) {
    return limit_of([&](double y) { return boundary_B1_term(a, f, y); }, opt);
}

BoundaryLimit self_adjoint_residual(double a, const Extension& ext, const SmoothTail& f, const LimitOptions& opt) {
    if (ext.is_infinite()) return boundary_B0(a, f, opt);
    const double theta = ext.theta();
    return limit_of([&](double y) { return boundary_B1_term(a, f, y) - theta * boundary_B0_term(a, f, y); }, opt);
}

int correction_length(double a) { return a < -1.0 ? static_cast<int>(std::floor(-a)) : 0; }

IndefiniteInner indefinite_inner(double a, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
    if (a <= -1.0 && is_integer(a)) raise(ErrorCode::IntegerA, "indefinite inner product needs non-integer a < -1");
    if (f.size() == 0 || g.size() == 0) raise(ErrorCode::NonPolynomialInput, "empty coefficient vector");
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (!std::isfinite(f[i])) raise(ErrorCode::NonPolynomialInput, "non-finite coefficient");
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (!std::isfinite(g[i])) raise(ErrorCode::NonPolynomialInput, "non-finite coefficient");

    const Eigen::Index deg = f.size() + g.size() - 2;
    Eigen::VectorXd P = Eigen::VectorXd::Zero(deg + 1);
    for (Eigen::Index i = 0; i < f.size(); ++i)
        for (Eigen::Index j = 0; j < g.size(); ++j) P[i + j] += f[i] * g[j];

    // Finite part of int_0^1 y^a e^{-y} P(y) dy from the Taylor series of e^{-y} P termwise.
    const Eigen::Index K = deg + 60;
    double head = 0.0;
    for (Eigen::Index k = 0; k <= K; ++k) {
        double t = 0.0;
        for (Eigen::Index j = std::max<Eigen::Index>(0, k - 60); j <= std::min(k, deg); ++j) {
            const int m = static_cast<int>(k - j);
            t += P[j] * ((m % 2 == 0) ? 1.0 : -1.0) / std::tgamma(m + 1.0);
        }
        head += t / (a + k + 1.0);
    }
    auto integrand = [&](double y) {
        double p = 0.0;
        for (Eigen::Index j = deg; j >= 0; --j) p = p * y + P[j];
        return std::exp(a * std::log(y) - y) * p;
    };
    QuadratureOptions opt;
    opt.rel_tol = 1e-14;
    opt.abs_tol = 1e-15;
    const double tail = integrate_to_infinity(integrand, 1.0, opt, 4.0).value;

    IndefiniteInner res;
    res.integral = head + tail;
    const int n = correction_length(a);
    for (int j = 0; j < n; ++j) {
        const double fj = j < f.size() ? f[j] : 0.0, gj = j < g.size() ? g[j] : 0.0;
        res.correction += std::tgamma(j + 1.0) * fj * gj * reciprocal_gamma(a + j + 1.0);
    }
    res.value = res.integral - res.correction;
    return res;
}

EigenfunctionSpec EigenfunctionSpec::laguerre_poly(int n, double a) {
    if (n < 0) raise(ErrorCode::InvalidParams, "Laguerre index must be >= 0");
    EigenfunctionSpec s;
    s.kind_ = Kind::LaguerrePoly;
    s.n_ = n;
    s.a_ = a;
    s.Lambda_ = n == 0 ? 0.0 : -static_cast<double>(n);
    return s;
}

EigenfunctionSpec EigenfunctionSpec::kummer(double a, double Lambda, double C1, double C2) {
    if (C1 != 0.0 && is_nonpositive_integer(1.0 + a)) raise(ErrorCode::ParameterPole, "1+a");
    EigenfunctionSpec s;
    s.kind_ = Kind::KummerCombination;
    s.a_ = a;
    s.Lambda_ = Lambda;
    s.C1_ = C1;
    s.C2_ = C2;
    return s;
}

double EigenfunctionSpec::derivative(int order, double y) const {
    if (kind_ == Kind::LaguerrePoly) return laguerre_deriv(n_, a_, y, order);
    double v = 0.0;
    if (C1_ != 0.0) v += C1_ * (order == 0 ? kummer_phi(Lambda_, 1.0 + a_, y) : kummer_phi_deriv(Lambda_, 1.0 + a_, y, order));
    if (C2_ != 0.0)
        v += C2_ * (order == 0 ? tricomi_psi(Lambda_, 1.0 + a_, y) : tricomi_psi_deriv(Lambda_, 1.0 + a_, y, order));
    return v;
}

Jet EigenfunctionSpec::jet(double y) const { return {derivative(0, y), derivative(1, y), derivative(2, y)}; }

SmoothTail EigenfunctionSpec::as_tail() const {
    return [self = *this](int order, double y) { return self.derivative(order, y); };
}

EigenfunctionSpec kummer_eigensolution(double a, double Lambda, double C1, double C2) {
    return EigenfunctionSpec::kummer(a, Lambda, C1, C2);
}

double apply_laguerre_operator(double a, const Jet& p, double y) { return y * p.d2 + (a + 1.0 - y) * p.d1; }

}  // namespace cev
