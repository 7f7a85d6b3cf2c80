#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cev/params.hpp"
#include "cev/sl_core.hpp"

namespace cev {

/// Increasing positive harmonic function of the generator,
/// h(x) = int_0^x exp(nu s^{2-gamma}) ds, for 0 < gamma < 2.
///
/// With z = |nu| x^{2-gamma} and k = 1/(2-gamma), h = k |nu|^{-k} P(z) where
/// P(z) = int_0^z t^{k-1} e^{-t} dt. P is tabulated once per parameter set on
/// panels of width 1/2 in z and completed by Gauss-Legendre on the partial panel;
/// z <= 1 uses the power series.
class HarmonicFunction {
public:
    explicit HarmonicFunction(const ModelParams& m);

    double value(double x) const;
    double derivative(double x) const;
    Jet jet(double x) const;
    /// h(infinity) = k |nu|^{-k} Gamma(k).
    double limit() const;

private:
    double lower_gamma(double z) const;

    double gamma_, nu_, k_, D_, prefactor_;
    std::shared_ptr<const std::vector<double>> table_;  // P at z = 1 + j/2
};

/// (h, h') at x; WrongRegime unless 0 < gamma < 2.
std::pair<double, double> harmonic_h(const ModelParams& m, double x);

/// sigma^2 x^gamma h'(x) / h(x), the drift added by conditioning on survival.
double doob_drift(const ModelParams& m, double x);
double doob_drift(const ModelParams& m, const HarmonicFunction& h, double x);

/// 1/2 sigma^2 x^gamma f'' + (mu x + doob_drift) f'.
double conditioned_generator_apply(const ModelParams& m, const HarmonicFunction& h, const Jet& f, double x);
/// h^{-1} G(h f), the same operator computed through the generator.
double doob_transform_apply(const ModelParams& m, const HarmonicFunction& h, const Jet& f, double x);

/// ((mu - r)/sigma) x^{1-gamma/2}.
double risk_premium(const ModelParams& m, double x);
/// exp(((r-mu)/sigma^2) x^{2-gamma}/(2-gamma)); x^{(r-mu)/sigma^2} at gamma = 2.
double candidate_phi(const ModelParams& m, double x);
/// d/dx log phi = (r - mu) x^{1-gamma} / sigma^2.
double candidate_phi_log_derivative(const ModelParams& m, double x);
/// rho with G phi + (r + rho) phi = 0 for the power phi at gamma = 2.
/// WrongRegime otherwise: no constant rho exists in general.
double black_scholes_rho(const ModelParams& m);

struct RiskPremiumSpec {
    std::function<double(double)> lambda_fn;
    std::function<double(double)> phi_fn;
    std::optional<double> rho;
};

RiskPremiumSpec risk_premium_spec(const ModelParams& m);

enum class Mechanism { BoundaryConditioningArbitrage, StrictLocalMartingaleBubble, BlackScholesBaseline };
enum class ForwardModeVisibility { IntegrableForwardMode, GeneralizedBoundaryStateOnly, NoPositiveBoundaryState };

struct RegimeReport {
    double gamma = 0.0;
    Band band = Band::SubOne;
    bool attainable_zero = false;
    Mechanism mechanism = Mechanism::BlackScholesBaseline;
    std::optional<ForwardModeVisibility> forward_mode_visibility;  // none at gamma = 2
    std::optional<double> delta;                                   // none at gamma = 2
    bool integrable_forward_modes = false;
    /// #{lambda_n >= 0} of the theta = inf spectrum for gamma > 2.
    std::optional<int> positive_sector_count;
};

RegimeReport arbitrage_report(const ModelParams& m);

std::string to_string(Mechanism v);
std::string to_string(ForwardModeVisibility v);

}  // namespace cev
