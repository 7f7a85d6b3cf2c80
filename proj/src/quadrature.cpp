#include "cev/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <Eigen/Eigenvalues>

#include "cev/error.hpp"
#include "cev/specfun.hpp"

namespace cev {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo, hi, value, error, resabs;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const RealFn& f, double lo, double hi) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    std::array<double, 15> fv;
    fv[7] = f(c);
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(c - h * kXgk[j]);
        fv[14 - j] = f(c + h * kXgk[j]);
    }
    for (double v : fv)
        if (!std::isfinite(v)) raise(ErrorCode::NonConvergent, "non-finite integrand value");
    double resk = kWgk[7] * fv[7], resg = kWg[3] * fv[7], resabs = kWgk[7] * std::abs(fv[7]);
    for (int j = 0; j < 7; ++j) {
        const double s = fv[j] + fv[14 - j];
        resk += kWgk[j] * s;
        resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
        if (j % 2 == 1) resg += kWg[j / 2] * s;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
    const double ah = std::abs(h);
    double err = std::abs((resk - resg) * h);
    resasc *= ah;
    resabs *= ah;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {lo, hi, resk * h, err, resabs};
}

QuadratureResult adapt(const RealFn& f, const std::vector<std::pair<double, double>>& pieces,
                       const QuadratureOptions& opt) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    std::priority_queue<Segment> heap;
    int evals = 0;
    for (auto [lo, hi] : pieces) {
        if (lo == hi) continue;
        heap.push(gk15(f, lo, hi));
        evals += 15;
    }
    auto totals = [&heap]() {
        auto copy = heap;
        double v = 0, e = 0, a = 0;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            a += copy.top().resabs;
            copy.pop();
        }
        return std::array<double, 3>{v, e, a};
    };
    double value = 0, error = 0, resabs = 0;
    {
        auto t = totals();
        value = t[0], error = t[1], resabs = t[2];
    }
    while (!heap.empty()) {
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
        if (error <= target || error <= 50.0 * eps * resabs) break;
        if (static_cast<int>(heap.size()) >= opt.max_intervals) break;
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > std::min(worst.lo, worst.hi) && mid < std::max(worst.lo, worst.hi))) break;
        heap.pop();
        Segment left = gk15(f, worst.lo, mid), right = gk15(f, mid, worst.hi);
        evals += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        resabs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
    }
    auto t = totals();
    QuadratureResult res{t[0], t[1], evals};
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value));
    if (opt.throw_on_failure && res.error > target && res.error > 50.0 * eps * t[2] &&
        res.error > 1e3 * target)
        raise(ErrorCode::NonConvergent, "adaptive quadrature stalled: error " + std::to_string(res.error) +
                                            " vs target " + std::to_string(target));
    return res;
}

}  // namespace

QuadratureResult integrate(const RealFn& f, double lo, double hi, const QuadratureOptions& opt) {
    return adapt(f, {{lo, hi}}, opt);
}

QuadratureResult integrate_to_infinity(const RealFn& f, double lo, const QuadratureOptions& opt, double scale) {
    auto g = [&f, lo, scale](double t) {
        const double s = 1.0 - t;
        const double v = f(lo + scale * t / s);
        return v == 0.0 ? 0.0 : scale * v / (s * s);
    };
    return adapt(g, {{0.0, 0.5}, {0.5, 1.0}}, opt);
}

QuadratureResult integrate_positive_axis(const RealFn& f, const QuadratureOptions& opt, double pivot) {
    const double lp = std::log(pivot);
    // u = lp + t/(1-t) on the right, u = lp - t/(1-t) on the left.
    auto g = [&f, lp](double t) {
        const double s = 1.0 - std::abs(t);
        const double u = lp + t / s;
        if (u > 709.0 || u < -745.0) return 0.0;
        const double x = std::exp(u);
        const double v = f(x);
        return v == 0.0 ? 0.0 : v * x / (s * s);
    };
    return adapt(g, {{-1.0, -0.5}, {-0.5, 0.0}, {0.0, 0.5}, {0.5, 1.0}}, opt);
}

QuadratureResult integrate_breakpoints(const RealFn& f, const std::vector<double>& pts, bool open_tail,
                                       const QuadratureOptions& opt, double tail_scale) {
    std::vector<std::pair<double, double>> pieces;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) pieces.emplace_back(pts[i], pts[i + 1]);
    QuadratureResult res;
    if (!pieces.empty()) res = adapt(f, pieces, opt);
    if (open_tail) {
        QuadratureOptions tail_opt = opt;
        tail_opt.abs_tol = std::max(opt.abs_tol, 0.1 * opt.rel_tol * std::abs(res.value));
        auto tail = integrate_to_infinity(f, pts.back(), tail_opt, tail_scale);
        res.value += tail.value;
        res.error += tail.error;
        res.evaluations += tail.evaluations;
    }
    return res;
}

void gauss_legendre_nodes(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

void gauss_laguerre_nodes(int n, double alpha, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
    if (n < 1 || !(alpha > -1.0)) raise(ErrorCode::InvalidParams, "Gauss-Laguerre needs n >= 1, alpha > -1");
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + alpha + 1.0;
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k * (k + alpha));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    nodes = solver.eigenvalues();
    weights.resize(n);
    const double log_pref = std::lgamma(n + alpha + 1.0) - std::lgamma(n + 1.0) - 2.0 * std::log(n + 1.0);
    for (int i = 0; i < n; ++i) {
        double x = nodes[i];
        for (int it = 0; it < 8; ++it) {
            const double p = laguerre(n, alpha, x);
            const double dp = -laguerre(n - 1, alpha + 1.0, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) <= 4e-16 * x) break;
        }
        nodes[i] = x;
        const double l = laguerre(n + 1, alpha, x);
        weights[i] = std::exp(log_pref + std::log(x) - 2.0 * std::log(std::abs(l)));
    }
}

GaussLaguerreRule::GaussLaguerreRule(int n, double alpha) : alpha_(alpha) {
    gauss_laguerre_nodes(n, alpha, nodes_, weights_);
    gauss_laguerre_nodes(std::max(n / 2, 1), alpha, coarse_nodes_, coarse_weights_);
}

QuadratureResult GaussLaguerreRule::integrate(const RealFn& f) const {
    auto apply = [&f](const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
        Eigen::VectorXd terms(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) terms[i] = w[i] * f(x[i]);
        return std::pair{terms.sum(), terms.cwiseAbs().sum()};
    };
    auto [fine, fine_abs] = apply(nodes_, weights_);
    auto [coarse, coarse_abs] = apply(coarse_nodes_, coarse_weights_);
    (void)coarse_abs;
    const double roundoff = 1e2 * std::numeric_limits<double>::epsilon() * fine_abs;
    return {fine, std::max(std::abs(fine - coarse), roundoff), static_cast<int>(nodes_.size() + coarse_nodes_.size())};
}

}  // namespace cev
