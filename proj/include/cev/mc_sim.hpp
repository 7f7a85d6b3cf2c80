#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cev/params.hpp"

namespace cev {

/// Philox4x32-10 counter-based generator.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key);
};

/// Standard normal keyed by (seed, path, step); stream selects an independent draw at the same step.
double normal_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint32_t stream = 0);

enum class Scheme { EulerMaruyamaAbsorbed, MilsteinAbsorbed };
enum class Measure { Physical, RiskNeutral };

struct SimConfig {
    std::int64_t n_paths = 100000;
    double dt = 1e-3;
    double T = 1.0;
    Scheme scheme = Scheme::EulerMaruyamaAbsorbed;
    std::uint64_t seed = 1;
    Measure measure = Measure::Physical;
    bool antithetic = false;
    /// Worker threads; 0 picks hardware_concurrency. Results do not depend on it.
    int threads = 0;

    /// Throws ConfigInvalid.
    void validate() const;
    std::int64_t steps() const;
};

struct PathEnsemble {
    std::vector<double> terminal;
    std::vector<std::optional<double>> absorption_time;
    std::vector<double> density_Z;  ///< Z_T of the density process
    std::vector<double> weights;    ///< importance weights (1 unless set by the estimator)
    std::int64_t clamp_events = 0;
    std::int64_t total_steps = 0;

    std::int64_t absorbed_count() const;
};

struct EstimateCI {
    double point = 0.0;
    double std_error = 0.0;
    double level = 0.99;
    std::int64_t n_effective = 0;
    std::string note;

    double half_width() const;
    bool contains(double v) const { return std::abs(v - point) <= half_width(); }
};

/// Two-sided standard normal quantile z with P(|N| <= z) = level.
double normal_quantile_two_sided(double level);

/// Drift coefficient: mu under Physical, r under RiskNeutral.
double drift_rate(const ModelParams& m, Measure measure);

/// One step of the scheme from x > 0 with Brownian increment dW. Returns the raw
/// proposal; callers apply absorption (gamma < 2) or reflection (gamma >= 2).
double scheme_step(double x, double k, const ModelParams& m, Scheme scheme, double dt, double dW);

PathEnsemble simulate(const ModelParams& m, const SimConfig& cfg);

/// Conditioned dynamics: drift k x + sigma^2 x^gamma h'/h, reflected at a 1e-12 floor.
/// Returns terminal values. WrongRegime unless 0 < gamma < 2.
std::vector<double> simulate_conditioned(const ModelParams& m, const SimConfig& cfg);

/// x0 - E[e^{-rT} X_T] under the risk-neutral measure.
EstimateCI martingale_defect(const ModelParams& m, const SimConfig& cfg);

/// P(absorbed by T). gamma >= 2 returns exactly 0 with a note, without sampling.
EstimateCI absorption_probability(const ModelParams& m, const SimConfig& cfg);

/// E[Z_T] under the physical measure.
EstimateCI density_process_mean(const ModelParams& m, const SimConfig& cfg);

struct DoobLawCheck {
    double ks_statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    double n_effective = 0.0;
    /// Same test with weights h(X_T)^2, which must fail.
    double control_ks_statistic = 0.0;
    double control_threshold = 0.0;
    bool control_pass = false;
};

DoobLawCheck doob_law_check(const ModelParams& m, const SimConfig& cfg);

/// Weighted two-sample Kolmogorov-Smirnov distance; weights of b are normalised internally.
double weighted_ks_distance(std::vector<double> a, const std::vector<double>& b, const std::vector<double>& wb);
/// 1% critical value 1.628 sqrt((n + m) / (n m)).
double ks_critical_1pct(double n, double m);

struct SimulatedPath {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> increments;  ///< dW per step; empty when not stored
    std::optional<double> absorption_time;
};

SimulatedPath simulate_path(const ModelParams& m, const SimConfig& cfg, std::int64_t path_index,
                            bool store_increments = true);

struct DensityProcess {
    std::vector<double> Z;
    /// max_t |phi(X_t) - phi(X_0) e^{-(rho+r)t} Z_t| at gamma = 2.
    std::optional<double> phi_identity_gap;
};

/// Stochastic exponential of -lambda along the stored increments, frozen at absorption.
/// MissingIncrements when the path has none.
DensityProcess density_process(const ModelParams& m, const SimulatedPath& path);

/// Sum by recursive halving; fixed order, so the result depends only on the data.
double pairwise_sum(const double* v, std::size_t n);

std::string to_string(Scheme s);
std::string to_string(Measure m);

}  // namespace cev
