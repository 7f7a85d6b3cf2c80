#include "cev/arbitrage.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "cev/error.hpp"

namespace cev {

namespace {

constexpr double kPanel = 0.5;
constexpr int kGaussPoints = 16;

void require_sub_two(const ModelParams& m) {
    m.validate();
    if (!(m.gamma > 0.0 && m.gamma < 2.0))
        raise(ErrorCode::WrongRegime, "the harmonic function h is defined for 0 < gamma < 2");
}

const std::pair<Eigen::VectorXd, Eigen::VectorXd>& legendre_rule() {
    static const auto rule = [] {
        std::pair<Eigen::VectorXd, Eigen::VectorXd> r;
        gauss_legendre_nodes(kGaussPoints, r.first, r.second);
        return r;
    }();
    return rule;
}

// int_lo^hi t^{k-1} e^{-t} dt by one Gauss-Legendre panel.
double panel(double k, double lo, double hi) {
    const auto& [x, w] = legendre_rule();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < kGaussPoints; ++i) {
        const double t = c + h * x[i];
        s += w[i] * std::exp((k - 1.0) * std::log(t) - t);
    }
    return s * h;
}

// P(z) for z <= 1: sum_j (-1)^j z^{j+k} / (j! (j+k)).
double lower_gamma_series(double k, double z) {
    double term = 1.0, sum = 1.0 / k;
    for (int j = 1; j < 200; ++j) {
        term *= -z / j;
        const double add = term / (j + k);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum * std::pow(z, k);
}

}  // namespace

HarmonicFunction::HarmonicFunction(const ModelParams& m) : gamma_(m.gamma) {
    require_sub_two(m);
    const auto d = derive_params(m);
    nu_ = d.nu();
    D_ = 2.0 - gamma_;
    k_ = 1.0 / D_;
    if (k_ > 150.0) raise(ErrorCode::InvalidParams, "gamma too close to 2 for the tabulated harmonic function");
    prefactor_ = k_ * std::pow(std::abs(nu_), -k_);
    const double z_end = std::max(750.0, k_ + 40.0 * std::sqrt(k_) + 100.0);
    const int panels = static_cast<int>(std::ceil((z_end - 1.0) / kPanel));
    auto table = std::make_shared<std::vector<double>>();
    table->reserve(panels + 1);
    double acc = lower_gamma_series(k_, 1.0);
    table->push_back(acc);
    for (int j = 0; j < panels; ++j) {
        acc += panel(k_, 1.0 + j * kPanel, 1.0 + (j + 1) * kPanel);
        table->push_back(acc);
    }
    table_ = std::move(table);
}

double HarmonicFunction::lower_gamma(double z) const {
    if (z <= 1.0) return lower_gamma_series(k_, z);
    const auto& t = *table_;
    const auto j = static_cast<std::size_t>((z - 1.0) / kPanel);
    if (j + 1 >= t.size()) return t.back();
    const double lo = 1.0 + j * kPanel;
    return t[j] + (z > lo ? panel(k_, lo, z) : 0.0);
}

double HarmonicFunction::value(double x) const {
    if (x <= 0.0) return 0.0;
    return prefactor_ * lower_gamma(std::abs(nu_) * std::pow(x, D_));
}

double HarmonicFunction::derivative(double x) const { return std::exp(nu_ * std::pow(x, D_)); }

Jet HarmonicFunction::jet(double x) const {
    const double hp = derivative(x);
    return {value(x), hp, hp * nu_ * D_ * std::pow(x, D_ - 1.0)};
}

double HarmonicFunction::limit() const { return prefactor_ * std::tgamma(k_); }

std::pair<double, double> harmonic_h(const ModelParams& m, double x) {
    const HarmonicFunction h(m);
    return {h.value(x), h.derivative(x)};
}

double doob_drift(const ModelParams& m, const HarmonicFunction& h, double x) {
    return m.sigma * m.sigma * std::pow(x, m.gamma) * h.derivative(x) / h.value(x);
}

double doob_drift(const ModelParams& m, double x) { return doob_drift(m, HarmonicFunction(m), x); }

double conditioned_generator_apply(const ModelParams& m, const HarmonicFunction& h, const Jet& f, double x) {
    return 0.5 * m.sigma * m.sigma * std::pow(x, m.gamma) * f.d2 + (m.mu * x + doob_drift(m, h, x)) * f.d1;
}

double doob_transform_apply(const ModelParams& m, const HarmonicFunction& h, const Jet& f, double x) {
    const Jet hj = h.jet(x);
    const Jet hf{hj.value * f.value, hj.d1 * f.value + hj.value * f.d1,
                 hj.d2 * f.value + 2.0 * hj.d1 * f.d1 + hj.value * f.d2};
    return apply_generator(m, hf, x) / hj.value;
}

double risk_premium(const ModelParams& m, double x) {
    return (m.mu - m.r) / m.sigma * std::pow(x, 1.0 - 0.5 * m.gamma);
}

double candidate_phi(const ModelParams& m, double x) {
    const double c = (m.r - m.mu) / (m.sigma * m.sigma);
    if (m.gamma == 2.0) return std::pow(x, c);
    const double D = 2.0 - m.gamma;
    return std::exp(c * std::pow(x, D) / D);
}

double candidate_phi_log_derivative(const ModelParams& m, double x) {
    return (m.r - m.mu) * std::pow(x, 1.0 - m.gamma) / (m.sigma * m.sigma);
}

double black_scholes_rho(const ModelParams& m) {
    if (m.gamma != 2.0) raise(ErrorCode::WrongRegime, "an exact constant rho is available only at gamma = 2");
    const double s2 = m.sigma * m.sigma, k = (m.r - m.mu) / s2;
    return -m.r - m.mu * k - 0.5 * s2 * k * (k - 1.0);
}

RiskPremiumSpec risk_premium_spec(const ModelParams& m) {
    RiskPremiumSpec s;
    s.lambda_fn = [m](double x) { return risk_premium(m, x); };
    s.phi_fn = [m](double x) { return candidate_phi(m, x); };
    if (m.gamma == 2.0) s.rho = black_scholes_rho(m);
    return s;
}

RegimeReport arbitrage_report(const ModelParams& m) {
    m.validate();
    const auto reg = classify_regime(m.gamma);
    RegimeReport r;
    r.gamma = m.gamma;
    r.band = reg.band;
    r.attainable_zero = m.gamma < 2.0;
    if (m.gamma != 2.0) r.delta = derive_params(m).delta();
    switch (reg.band) {
        case Band::SubOne:
            r.mechanism = Mechanism::BoundaryConditioningArbitrage;
            r.forward_mode_visibility = ForwardModeVisibility::IntegrableForwardMode;
            r.integrable_forward_modes = true;
            break;
        case Band::OneToTwo:
            r.mechanism = Mechanism::BoundaryConditioningArbitrage;
            r.forward_mode_visibility = ForwardModeVisibility::GeneralizedBoundaryStateOnly;
            break;
        case Band::BlackScholes:
            r.mechanism = Mechanism::BlackScholesBaseline;
            break;
        case Band::SuperTwo:
            r.mechanism = Mechanism::StrictLocalMartingaleBubble;
            r.forward_mode_visibility = ForwardModeVisibility::NoPositiveBoundaryState;
            r.positive_sector_count = static_cast<int>(std::floor(1.0 / (m.gamma - 2.0))) + 1;
            break;
    }
    return r;
}

std::string to_string(Mechanism v) {
    switch (v) {
        case Mechanism::BoundaryConditioningArbitrage: return "BoundaryConditioningArbitrage";
        case Mechanism::StrictLocalMartingaleBubble: return "StrictLocalMartingaleBubble";
        case Mechanism::BlackScholesBaseline: return "BlackScholesBaseline";
    }
    return "";
}

std::string to_string(ForwardModeVisibility v) {
    switch (v) {
        case ForwardModeVisibility::IntegrableForwardMode: return "IntegrableForwardMode";
        case ForwardModeVisibility::GeneralizedBoundaryStateOnly: return "GeneralizedBoundaryStateOnly";
        case ForwardModeVisibility::NoPositiveBoundaryState: return "NoPositiveBoundaryState";
    }
    return "";
}

}  // namespace cev
