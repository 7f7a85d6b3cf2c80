#include "cev/mc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "cev/arbitrage.hpp"
#include "cev/error.hpp"

namespace cev {

namespace {

constexpr double kFloor = 1e-12;

std::uint32_t mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    return static_cast<std::uint32_t>(p);
}

double unit_open(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t v = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(v) + 0.5) * 0x1p-53;
}

// Runs body(begin, end) over [0, n) in contiguous blocks, one per worker.
void parallel_blocks(std::int64_t n, int threads, const std::function<void(std::int64_t, std::int64_t)>& body) {
    int t = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    t = static_cast<int>(std::min<std::int64_t>(t, n));
    if (t <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n + t - 1) / t;
    for (int i = 0; i < t; ++i) {
        const std::int64_t b = i * chunk, e = std::min(n, b + chunk);
        if (b < e) pool.emplace_back(body, b, e);
    }
    for (auto& th : pool) th.join();
}

struct Moments {
    double mean = 0.0, sd = 0.0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    const std::size_t n = v.size();
    if (n == 0) return m;
    m.mean = pairwise_sum(v.data(), n) / static_cast<double>(n);
    if (n < 2) return m;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - m.mean) * (v[i] - m.mean);
    m.sd = std::sqrt(pairwise_sum(sq.data(), n) / static_cast<double>(n - 1));
    return m;
}

// Per-path values folded into antithetic pair means when requested.
EstimateCI estimate(std::vector<double> v, bool antithetic, double level = 0.99) {
    if (antithetic) {
        std::vector<double> pairs;
        pairs.reserve(v.size() / 2 + 1);
        for (std::size_t i = 0; i + 1 < v.size(); i += 2) pairs.push_back(0.5 * (v[i] + v[i + 1]));
        if (v.size() % 2) pairs.push_back(v.back());
        v = std::move(pairs);
    }
    const auto mo = moments(v);
    EstimateCI ci;
    ci.point = mo.mean;
    ci.std_error = v.size() > 1 ? mo.sd / std::sqrt(static_cast<double>(v.size())) : 0.0;
    ci.level = level;
    ci.n_effective = static_cast<std::int64_t>(v.size());
    return ci;
}

struct PathState {
    double x = 0.0;
    double Z = 1.0;
    std::optional<double> absorbed_at;
    std::int64_t clamps = 0;
};

class Stepper {
public:
    Stepper(const ModelParams& m, const SimConfig& cfg)
        : m_(m), cfg_(cfg), k_(drift_rate(m, cfg.measure)), sqdt_(std::sqrt(cfg.dt)),
          lambda_scale_(cfg.measure == Measure::Physical ? (m.mu - m.r) / m.sigma : 0.0) {}

    double increment(std::int64_t path, std::int64_t step, std::uint32_t stream = 0) const {
        const std::uint64_t base = cfg_.antithetic ? static_cast<std::uint64_t>(path) / 2 : path;
        const double sign = cfg_.antithetic && (path % 2) ? -1.0 : 1.0;
        return sign * sqdt_ * normal_draw(cfg_.seed, base, step, stream);
    }

    void advance(PathState& s, double t, double dW) const {
        if (s.absorbed_at) return;
        const double x = s.x;
        double xn = scheme_step(x, k_, m_, cfg_.scheme, cfg_.dt, dW);
        if (lambda_scale_ != 0.0) {
            const double lam = lambda_scale_ * std::pow(x, 1.0 - 0.5 * m_.gamma);
            s.Z *= std::exp(-lam * dW - 0.5 * lam * lam * cfg_.dt);
        }
        if (m_.gamma < 2.0) {
            if (xn <= 0.0) {
                s.absorbed_at = t + cfg_.dt * x / (x - xn);
                xn = 0.0;
            }
        } else if (xn <= kFloor) {
            // Reflecting a large overshoot feeds back into x^{gamma/2}; clamp to the floor instead.
            xn = kFloor;
            ++s.clamps;
        }
        s.x = xn;
    }

private:
    const ModelParams& m_;
    const SimConfig& cfg_;
    double k_, sqdt_, lambda_scale_;
};

// Cubic Lagrange interpolation of the Doob add-on drift on a log-x grid.
class DriftTable {
public:
    DriftTable(const ModelParams& m, const HarmonicFunction& h) : m_(m), h_(h) {
        values_.resize(kPoints);
        du_ = (std::log(kHi) - std::log(kLo)) / (kPoints - 1);
        for (int i = 0; i < kPoints; ++i) values_[i] = doob_drift(m, h, std::exp(std::log(kLo) + i * du_));
    }

    double operator()(double x) const {
        if (x < kLo * 2.0 || x > kHi / 2.0) return doob_drift(m_, h_, x);
        const double u = (std::log(x) - std::log(kLo)) / du_;
        const int i = std::clamp(static_cast<int>(u) - 1, 0, kPoints - 4);
        const double t = u - i;
        const double* v = &values_[i];
        // nodes at t = 0, 1, 2, 3
        return -v[0] * (t - 1) * (t - 2) * (t - 3) / 6.0 + v[1] * t * (t - 2) * (t - 3) / 2.0 -
               v[2] * t * (t - 1) * (t - 3) / 2.0 + v[3] * t * (t - 1) * (t - 2) / 6.0;
    }

private:
    static constexpr int kPoints = 6001;
    static constexpr double kLo = 1e-7, kHi = 1e4;
    const ModelParams& m_;
    const HarmonicFunction& h_;
    std::vector<double> values_;
    double du_ = 0.0;
};

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u, W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, hi1;
        const std::uint32_t lo0 = mulhilo(M0, ctr[0], hi0);
        const std::uint32_t lo1 = mulhilo(M1, ctr[2], hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

double normal_draw(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint32_t stream) {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32),
                                  static_cast<std::uint32_t>(step), stream};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const auto r = Philox4x32::generate(ctr, key);
    const double u1 = unit_open(r[0], r[1]), u2 = unit_open(r[2], r[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SimConfig::validate() const {
    auto bad = [](const std::string& what) { raise(ErrorCode::ConfigInvalid, what); };
    if (n_paths < 1) bad("n_paths must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) bad("dt must be > 0");
    if (!(T > 0.0) || !std::isfinite(T)) bad("T must be > 0");
    if (dt > T) bad("dt must not exceed T");
    const double n = T / dt;
    if (std::abs(n - std::round(n)) > 1e-9 * n) bad("T must be an integer multiple of dt");
    if (threads < 0) bad("threads must be >= 0");
}

std::int64_t SimConfig::steps() const { return static_cast<std::int64_t>(std::llround(T / dt)); }

std::int64_t PathEnsemble::absorbed_count() const {
    return std::count_if(absorption_time.begin(), absorption_time.end(), [](const auto& t) { return t.has_value(); });
}

double normal_quantile_two_sided(double level) {
    if (!(level > 0.0 && level < 1.0)) raise(ErrorCode::InvalidParams, "confidence level must lie in (0,1)");
    // Solve erfc(z / sqrt 2) = 1 - level by Newton.
    double z = 2.0;
    for (int i = 0; i < 60; ++i) {
        const double f = std::erfc(z / std::numbers::sqrt2) - (1.0 - level);
        const double df = -2.0 * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
        const double step = f / df;
        z -= step;
        if (std::abs(step) < 1e-15 * z) break;
    }
    return z;
}

double EstimateCI::half_width() const { return normal_quantile_two_sided(level) * std_error; }

double drift_rate(const ModelParams& m, Measure measure) { return measure == Measure::Physical ? m.mu : m.r; }

double scheme_step(double x, double k, const ModelParams& m, Scheme scheme, double dt, double dW) {
    const double vol = m.sigma * std::pow(x, 0.5 * m.gamma);
    if (m.gamma < 1.0) return x + k * x * dt + vol * dW;
    double num = x + vol * dW;
    if (scheme == Scheme::MilsteinAbsorbed)
        num += 0.25 * m.sigma * m.sigma * m.gamma * std::pow(x, m.gamma - 1.0) * (dW * dW - dt);
    return num / (1.0 - k * dt);
}

namespace {

void check_inputs(const ModelParams& m, const SimConfig& cfg) {
    m.validate();
    cfg.validate();
    if (drift_rate(m, cfg.measure) * cfg.dt >= 1.0)
        raise(ErrorCode::ConfigInvalid, "drift-implicit step needs k*dt < 1");
}

}  // namespace

PathEnsemble simulate(const ModelParams& m, const SimConfig& cfg) {
    check_inputs(m, cfg);
    const std::int64_t n = cfg.n_paths, steps = cfg.steps();
    PathEnsemble out;
    out.terminal.assign(n, 0.0);
    out.absorption_time.assign(n, std::nullopt);
    out.density_Z.assign(n, 1.0);
    out.weights.assign(n, 1.0);
    std::vector<std::int64_t> clamps(n, 0);
    const Stepper stepper(m, cfg);
    parallel_blocks(n, cfg.threads, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t p = b; p < e; ++p) {
            PathState s;
            s.x = m.x0;
            for (std::int64_t k = 0; k < steps && !s.absorbed_at; ++k)
                stepper.advance(s, k * cfg.dt, stepper.increment(p, k));
            out.terminal[p] = s.x;
            out.absorption_time[p] = s.absorbed_at;
            out.density_Z[p] = s.Z;
            clamps[p] = s.clamps;
        }
    });
    out.clamp_events = std::accumulate(clamps.begin(), clamps.end(), std::int64_t{0});
    out.total_steps = n * steps;
    return out;
}

std::vector<double> simulate_conditioned(const ModelParams& m, const SimConfig& cfg) {
    check_inputs(m, cfg);
    if (!(m.gamma > 0.0 && m.gamma < 2.0)) raise(ErrorCode::WrongRegime, "conditioning on survival needs 0 < gamma < 2");
    const HarmonicFunction h(m);
    const DriftTable addon(m, h);
    const std::int64_t n = cfg.n_paths, steps = cfg.steps();
    const double k = drift_rate(m, Measure::Physical);
    std::vector<double> out(n);
    const Stepper stepper(m, cfg);
    parallel_blocks(n, cfg.threads, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t p = b; p < e; ++p) {
            double x = m.x0;
            for (std::int64_t s = 0; s < steps; ++s) {
                const double dW = stepper.increment(p, s, 1);
                double xn = scheme_step(x, k, m, cfg.scheme, cfg.dt, dW) + addon(x) * cfg.dt;
                if (xn <= kFloor) xn = std::max(-xn, kFloor);
                x = xn;
            }
            out[p] = x;
        }
    });
    return out;
}

EstimateCI martingale_defect(const ModelParams& m, const SimConfig& cfg) {
    if (cfg.measure != Measure::RiskNeutral) raise(ErrorCode::ConfigInvalid, "martingale defect needs measure RiskNeutral");
    const auto ens = simulate(m, cfg);
    const double disc = std::exp(-m.r * cfg.T);
    std::vector<double> v(ens.terminal.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = m.x0 - disc * ens.terminal[i];
    auto ci = estimate(std::move(v), cfg.antithetic);
    std::ostringstream os;
    os << "clamp_events=" << ens.clamp_events << " absorbed=" << ens.absorbed_count();
    ci.note = os.str();
    return ci;
}

EstimateCI absorption_probability(const ModelParams& m, const SimConfig& cfg) {
    if (m.gamma >= 2.0) {
        m.validate();
        cfg.validate();
        EstimateCI ci;
        ci.note = "0 is unattainable for gamma >= 2; exact 0 returned without sampling";
        return ci;
    }
    const auto ens = simulate(m, cfg);
    std::vector<double> v(ens.terminal.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = ens.absorption_time[i] ? 1.0 : 0.0;
    return estimate(std::move(v), cfg.antithetic);
}

EstimateCI density_process_mean(const ModelParams& m, const SimConfig& cfg) {
    if (cfg.measure != Measure::Physical) raise(ErrorCode::ConfigInvalid, "the density process lives under measure Physical");
    auto ens = simulate(m, cfg);
    return estimate(std::move(ens.density_Z), cfg.antithetic);
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double weighted_ks_distance(std::vector<double> a, const std::vector<double>& b, const std::vector<double>& wb) {
    if (a.empty() || b.empty() || b.size() != wb.size())
        raise(ErrorCode::InvalidParams, "KS distance needs non-empty samples and one weight per point");
    std::sort(a.begin(), a.end());
    std::vector<std::size_t> idx(b.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return b[i] < b[j]; });
    const double W = pairwise_sum(wb.data(), wb.size());
    if (!(W > 0.0)) raise(ErrorCode::InvalidParams, "weights sum to zero");
    const double na = static_cast<double>(a.size());
    std::size_t i = 0, j = 0;
    double Fa = 0.0, Fb = 0.0, D = 0.0;
    while (i < a.size() || j < idx.size()) {
        const double va = i < a.size() ? a[i] : INFINITY;
        const double vb = j < idx.size() ? b[idx[j]] : INFINITY;
        const double v = std::min(va, vb);
        while (i < a.size() && a[i] == v) ++i;
        while (j < idx.size() && b[idx[j]] == v) Fb += wb[idx[j++]] / W;
        Fa = i / na;
        D = std::max(D, std::abs(Fa - Fb));
    }
    return D;
}

double ks_critical_1pct(double n, double m) { return 1.628 * std::sqrt((n + m) / (n * m)); }

DoobLawCheck doob_law_check(const ModelParams& m, const SimConfig& cfg) {
    if (!(m.gamma > 0.0 && m.gamma < 2.0)) raise(ErrorCode::WrongRegime, "the Doob law check needs 0 < gamma < 2");
    SimConfig phys = cfg;
    phys.measure = Measure::Physical;
    const auto conditioned = simulate_conditioned(m, phys);
    const auto ens = simulate(m, phys);
    const HarmonicFunction h(m);
    const double h0 = h.value(m.x0);
    const std::size_t n = ens.terminal.size();
    std::vector<double> w(n), w2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ens.absorption_time[i] ? 0.0 : h.value(ens.terminal[i]) / h0;
        w[i] = r;
        w2[i] = r * r;
    }
    auto n_eff = [](const std::vector<double>& v) {
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
        const double s = pairwise_sum(v.data(), v.size());
        return s * s / pairwise_sum(sq.data(), sq.size());
    };
    DoobLawCheck res;
    const double na = static_cast<double>(conditioned.size());
    res.n_effective = n_eff(w);
    res.ks_statistic = weighted_ks_distance(conditioned, ens.terminal, w);
    res.threshold = ks_critical_1pct(na, res.n_effective);
    res.pass = res.ks_statistic < res.threshold;
    res.control_ks_statistic = weighted_ks_distance(conditioned, ens.terminal, w2);
    res.control_threshold = ks_critical_1pct(na, n_eff(w2));
    res.control_pass = res.control_ks_statistic < res.control_threshold;
    return res;
}

SimulatedPath simulate_path(const ModelParams& m, const SimConfig& cfg, std::int64_t path_index, bool store_increments) {
    check_inputs(m, cfg);
    const std::int64_t steps = cfg.steps();
    const Stepper stepper(m, cfg);
    SimulatedPath out;
    out.times.reserve(steps + 1);
    out.values.reserve(steps + 1);
    PathState s;
    s.x = m.x0;
    out.times.push_back(0.0);
    out.values.push_back(s.x);
    for (std::int64_t k = 0; k < steps; ++k) {
        const double dW = stepper.increment(path_index, k);
        if (store_increments) out.increments.push_back(dW);
        stepper.advance(s, k * cfg.dt, dW);
        out.times.push_back((k + 1) * cfg.dt);
        out.values.push_back(s.x);
    }
    out.absorption_time = s.absorbed_at;
    return out;
}

DensityProcess density_process(const ModelParams& m, const SimulatedPath& path) {
    if (path.increments.empty() || path.increments.size() + 1 != path.values.size())
        raise(ErrorCode::MissingIncrements, "the path carries no Brownian increments");
    DensityProcess out;
    out.Z.reserve(path.values.size());
    out.Z.push_back(1.0);
    const double c = (m.mu - m.r) / m.sigma;
    for (std::size_t k = 0; k < path.increments.size(); ++k) {
        const double x = path.values[k];
        double Z = out.Z.back();
        const bool frozen = path.absorption_time && path.times[k] >= *path.absorption_time;
        if (!frozen && x > 0.0) {
            const double lam = c * std::pow(x, 1.0 - 0.5 * m.gamma);
            const double dt = path.times[k + 1] - path.times[k];
            Z *= std::exp(-lam * path.increments[k] - 0.5 * lam * lam * dt);
        }
        out.Z.push_back(Z);
    }
    if (m.gamma == 2.0) {
        const double rho = black_scholes_rho(m), phi0 = candidate_phi(m, path.values[0]);
        double gap = 0.0;
        for (std::size_t k = 0; k < path.values.size(); ++k) {
            const double rhs = phi0 * std::exp(-(rho + m.r) * path.times[k]) * out.Z[k];
            gap = std::max(gap, std::abs(candidate_phi(m, path.values[k]) - rhs));
        }
        out.phi_identity_gap = gap;
    }
    return out;
}

std::string to_string(Scheme s) { return s == Scheme::MilsteinAbsorbed ? "milstein" : "euler"; }
std::string to_string(Measure m) { return m == Measure::Physical ? "physical" : "risk-neutral"; }

}  // namespace cev
