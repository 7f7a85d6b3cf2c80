#include "cev/params.hpp"

#include <cmath>

#include "cev/error.hpp"

namespace cev {

void ModelParams::validate() const {
    auto bad = [](double v) { return !std::isfinite(v); };
    if (bad(mu) || bad(sigma) || bad(gamma) || bad(r) || bad(x0))
        raise(ErrorCode::InvalidParams, "parameters must be finite");
    if (mu <= 0) raise(ErrorCode::InvalidParams, "mu must be > 0");
    if (sigma <= 0) raise(ErrorCode::InvalidParams, "sigma must be > 0");
    if (gamma < 0) raise(ErrorCode::InvalidParams, "gamma must be >= 0");
    if (r < 0) raise(ErrorCode::InvalidParams, "r must be >= 0");
    if (x0 <= 0) raise(ErrorCode::InvalidParams, "x0 must be > 0");
}

double DerivedParams::nu() const {
    if (!nu_) raise(ErrorCode::SingularGamma, "nu is undefined at gamma = 2");
    return *nu_;
}

double DerivedParams::a() const {
    if (!a_) raise(ErrorCode::SingularGamma, "a is undefined at gamma = 2");
    return *a_;
}

double DerivedParams::delta() const {
    if (!delta_) raise(ErrorCode::SingularGamma, "delta is undefined at gamma = 2");
    return *delta_;
}

DerivedParams derive_params(const ModelParams& m) {
    m.validate();
    DerivedParams d;
    const double g = m.gamma, s2 = m.sigma * m.sigma;
    d.gamma_ = g;
    d.beta_ = 2.0 - g;
    d.alpha_ = (3.0 - g) * s2 / (2.0 * m.mu);
    d.eta_ = 0.5 * d.beta_ * d.beta_ * s2;
    d.q_ = 2.0 * (s2 - m.mu) / s2;
    if (g != 2.0) {
        d.nu_ = -d.beta_ * m.mu / d.eta_;
        d.nu_alt_ = 2.0 * m.mu / ((g - 2.0) * s2);
        d.a_ = 1.0 / (2.0 - g);
        d.delta_ = 2.0 * (1.0 - g) / (2.0 - g);
    }
    return d;
}

double a_of_gamma(double gamma) {
    if (gamma == 2.0) raise(ErrorCode::SingularGamma, "a is undefined at gamma = 2");
    return 1.0 / (2.0 - gamma);
}

Regime classify_regime(double gamma) {
    if (!(gamma >= 0) || !std::isfinite(gamma)) raise(ErrorCode::InvalidParams, "gamma must be >= 0");
    Regime reg;
    if (gamma == 2.0) {
        reg.band = Band::BlackScholes;
        reg.endpoint_zero = EndpointType::Singular;
        reg.endpoint_infinity = EndpointType::Singular;
        reg.a_interval = "undefined (gamma = 2)";
        return reg;
    }
    const double a = a_of_gamma(gamma);
    reg.a = a;
    if (gamma < 1.0) {
        reg.band = Band::SubOne;
        reg.endpoint_zero = EndpointType::LimitCircle;
        reg.endpoint_infinity = EndpointType::LimitPoint;
        reg.a_interval = "[1/2,1)";
    } else if (gamma < 2.0) {
        reg.band = Band::OneToTwo;
        reg.endpoint_zero = EndpointType::LimitPoint;
        reg.endpoint_infinity = EndpointType::LimitPoint;
        reg.a_interval = "[1,inf)";
    } else {
        reg.band = Band::SuperTwo;
        reg.endpoint_zero = EndpointType::LimitPoint;
        reg.endpoint_infinity = EndpointType::LimitCircle;
        if (a == std::floor(a)) {
            reg.integer_a = true;
            reg.a_interval = "{" + std::to_string(static_cast<long>(a)) + "}";
        } else {
            const int n = static_cast<int>(std::floor(-a));
            reg.a_interval = "(" + std::to_string(-n - 1) + "," + std::to_string(-n) + ")";
            reg.pontryagin_index = (n + 1) / 2;
        }
    }
    return reg;
}

std::string to_string(Band band) {
    switch (band) {
        case Band::SubOne: return "SubOne";
        case Band::OneToTwo: return "OneToTwo";
        case Band::BlackScholes: return "BlackScholes";
        case Band::SuperTwo: return "SuperTwo";
    }
    return "?";
}

std::string to_string(EndpointType type) {
    switch (type) {
        case EndpointType::LimitCircle: return "LimitCircle";
        case EndpointType::LimitPoint: return "LimitPoint";
        case EndpointType::Singular: return "Singular";
    }
    return "?";
}

}  // namespace cev
