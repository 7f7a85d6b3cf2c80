#pragma once

#include <optional>
#include <string>

namespace cev {

/// Raw CEV inputs for dX = mu X dt + sigma X^{gamma/2} dW.
struct ModelParams {
    double mu = 1.0;
    double sigma = 1.0;
    double gamma = 1.0;
    double r = 0.0;
    double x0 = 1.0;

    /// Throws InvalidParams unless mu, sigma, x0 > 0 and gamma, r >= 0.
    void validate() const;
    bool is_black_scholes() const { return gamma == 2.0; }
};

/// Closed-form constants derived from ModelParams. The fields nu, a and delta
/// are undefined at gamma = 2; their accessors throw SingularGamma there.
class DerivedParams {
public:
    double gamma() const { return gamma_; }
    double beta() const { return beta_; }
    double alpha() const { return alpha_; }
    double eta() const { return eta_; }
    double q() const { return q_; }
    double nu() const;
    double a() const;
    double delta() const;
    bool singular() const { return !nu_.has_value(); }

    /// nu from 2 mu / ((gamma - 2) sigma^2), the alternate form.
    std::optional<double> nu_alternate() const { return nu_alt_; }

private:
    friend DerivedParams derive_params(const ModelParams& m);
    double gamma_ = 0, beta_ = 0, alpha_ = 0, eta_ = 0, q_ = 0;
    std::optional<double> nu_, nu_alt_, a_, delta_;
};

DerivedParams derive_params(const ModelParams& m);

enum class Band { SubOne, OneToTwo, BlackScholes, SuperTwo };
enum class EndpointType { LimitCircle, LimitPoint, Singular };

struct Regime {
    Band band = Band::SubOne;
    EndpointType endpoint_zero = EndpointType::LimitCircle;
    EndpointType endpoint_infinity = EndpointType::LimitPoint;
    std::optional<double> a;
    std::string a_interval;
    std::optional<int> pontryagin_index;
    bool integer_a = false;
};

Regime classify_regime(double gamma);

/// a = 1/(2 - gamma); throws SingularGamma at gamma = 2.
double a_of_gamma(double gamma);

std::string to_string(Band band);
std::string to_string(EndpointType type);

}  // namespace cev
