#include "cev/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cev/arbitrage.hpp"
#include "cev/cev_spec.hpp"
#include "cev/error.hpp"
#include "cev/laguerre_spec.hpp"
#include "cev/mc_sim.hpp"
#include "cev/specfun.hpp"

namespace cev::cli {

using nlohmann::ordered_json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

struct Grid {
    double lo = 0.1, hi = 5.0;
    int steps = 50;
    bool log = false;

    std::vector<double> points() const {
        std::vector<double> x(steps);
        for (int i = 0; i < steps; ++i) {
            const double t = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
            x[i] = log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
        }
        return x;
    }
};

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        raise(ErrorCode::ConfigInvalid, what + ": cannot parse '" + s + "' as a number");
    return v;
}

Grid parse_grid(const std::string& s, bool log) {
    Grid g;
    g.log = log;
    const auto a = s.find(':'), b = s.rfind(':');
    if (a == std::string::npos || a == b) raise(ErrorCode::ConfigInvalid, "grid must be lo:hi:steps");
    g.lo = parse_double(s.substr(0, a), "grid lo");
    g.hi = parse_double(s.substr(a + 1, b - a - 1), "grid hi");
    const double n = parse_double(s.substr(b + 1), "grid steps");
    if (n < 1 || n != std::floor(n) || n > 1e7) raise(ErrorCode::ConfigInvalid, "grid steps must be a positive integer");
    g.steps = static_cast<int>(n);
    if (!(g.lo > 0.0) || !(g.hi >= g.lo)) raise(ErrorCode::ConfigInvalid, "grid needs 0 < lo <= hi");
    return g;
}

Extension parse_theta(const std::string& s) {
    if (s == "inf") return Extension::infinity();
    return Extension::finite(parse_double(s, "theta"));
}

ordered_json params_json(const ModelParams& m) {
    return ordered_json{{"mu", m.mu}, {"sigma", m.sigma}, {"gamma", m.gamma}, {"r", m.r}, {"x0", m.x0}};
}

template <class T>
ordered_json nullable(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::string& comment, const std::vector<std::string>& header) : os_(os) {
        os_ << "# " << comment << '\n';
        for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
        os_ << '\n';
    }
    void row(const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os_ << (i ? "," : "") << format_number(v[i]);
        os_ << '\n';
    }

private:
    std::ostream& os_;
};

std::string params_comment(const ModelParams& m, const std::map<std::string, std::string>& extra = {}) {
    std::ostringstream os;
    os << "params mu=" << format_number(m.mu) << " sigma=" << format_number(m.sigma)
       << " gamma=" << format_number(m.gamma) << " r=" << format_number(m.r) << " x0=" << format_number(m.x0);
    for (const auto& [k, v] : extra) os << ' ' << k << '=' << v;
    return os.str();
}

void emit_json(std::ostream& os, const ordered_json& j) { os << j.dump(2) << '\n'; }

struct Options {
    ModelParams m;
    std::string format = "json";
    std::string out_path;
    std::string config;
    std::string theta = "inf";
    int count = 6;
    std::optional<int> n;
    std::optional<double> Lambda;
    double c = 1.0;
    std::string grid = "0.1:5:50";
    bool log_grid = false;
    double a = 0.5;
    std::string window;
    // Monte Carlo
    std::int64_t paths = 100000;
    double dt = 1e-3;
    double T = 1.0;
    std::uint64_t seed = 1;
    std::string measure;  // empty: the command's default
    std::string scheme = "euler";
    bool antithetic = false;
    int threads = 0;
    // specfun-eval
    std::string fn = "laguerre";
    double b = 1.0;
    double y = 1.0;
    // figure-data
    std::string which = "weights";
    std::string out_dir = ".";
};

SimConfig sim_config(const Options& o, Measure default_measure) {
    SimConfig c;
    c.n_paths = o.paths;
    c.dt = o.dt;
    c.T = o.T;
    c.seed = o.seed;
    c.antithetic = o.antithetic;
    c.threads = o.threads;
    c.measure = default_measure;
    if (o.measure.empty()) c.measure = default_measure;
    else if (o.measure == "physical") c.measure = Measure::Physical;
    else if (o.measure == "risk-neutral") c.measure = Measure::RiskNeutral;
    else raise(ErrorCode::ConfigInvalid, "measure must be physical or risk-neutral");
    c.scheme = o.scheme == "milstein" ? Scheme::MilsteinAbsorbed : Scheme::EulerMaruyamaAbsorbed;
    if (o.scheme != "milstein" && o.scheme != "euler") raise(ErrorCode::ConfigInvalid, "scheme must be euler or milstein");
    c.validate();
    return c;
}

ordered_json sim_json(const SimConfig& c) {
    return ordered_json{{"paths", c.n_paths},     {"dt", c.dt},
                        {"T", c.T},               {"seed", c.seed},
                        {"measure", to_string(c.measure)}, {"scheme", to_string(c.scheme)},
                        {"antithetic", c.antithetic}};
}

ordered_json estimate_json(const std::string& command, const ModelParams& m, const SimConfig& c, const EstimateCI& e) {
    ordered_json j;
    j["command"] = command;
    j["params"] = params_json(m);
    j["simulation"] = sim_json(c);
    j["estimate"] = e.point;
    j["std_error"] = e.std_error;
    j["ci_level"] = e.level;
    j["ci_half_width"] = e.half_width();
    j["n_paths"] = c.n_paths;
    j["diagnostics"] = ordered_json{{"n_effective", e.n_effective}, {"note", e.note}};
    return j;
}

ordered_json regime_json(const ModelParams& m) {
    const auto reg = classify_regime(m.gamma);
    const auto rep = arbitrage_report(m);
    ordered_json j;
    j["gamma"] = m.gamma;
    j["band"] = to_string(reg.band);
    j["endpoint_zero"] = to_string(reg.endpoint_zero);
    j["endpoint_infinity"] = to_string(reg.endpoint_infinity);
    j["a"] = nullable(reg.a);
    j["a_interval"] = reg.a_interval;
    j["pontryagin_index"] = nullable(reg.pontryagin_index);
    j["integer_a"] = reg.integer_a;
    std::string lc = "none";
    if (reg.endpoint_zero == EndpointType::LimitCircle) lc = "zero";
    if (reg.endpoint_infinity == EndpointType::LimitCircle) lc = "infinity";
    j["limit_circle_endpoint"] = lc;
    j["finite_theta_allowed"] = lc != "none" && !reg.integer_a;
    j["attainable_zero"] = rep.attainable_zero;
    j["mechanism"] = to_string(rep.mechanism);
    j["forward_mode_visibility"] =
        rep.forward_mode_visibility ? ordered_json(to_string(*rep.forward_mode_visibility)) : ordered_json(nullptr);
    j["delta"] = nullable(rep.delta);
    j["integrable_forward_modes"] = rep.integrable_forward_modes;
    j["positive_eigenvalue_sector"] = rep.positive_sector_count.has_value();
    j["positive_sector_count"] = nullable(rep.positive_sector_count);
    return j;
}

// Commands write to `os`; return value unused.
using Command = std::function<void(const Options&, std::ostream&)>;

void cmd_spectrum(const Options& o, std::ostream& os) {
    const auto ext = parse_theta(o.theta);
    if (o.count < 1) raise(ErrorCode::ConfigInvalid, "count must be >= 1");
    const auto pts = cev_spectrum(o.m, ext, SpectrumWindow::first(o.count));
    if (o.format == "csv") {
        CsvWriter w(os, params_comment(o.m, {{"theta", o.theta}, {"count", std::to_string(o.count)}}),
                    {"index", "lambda", "Lambda", "positive", "zero_mode"});
        for (std::size_t i = 0; i < pts.size(); ++i)
            w.row({pts[i].index ? static_cast<double>(*pts[i].index) : NAN, pts[i].lambda, pts[i].laguerre_Lambda,
                   pts[i].positive ? 1.0 : 0.0, pts[i].zero_mode ? 1.0 : 0.0});
        return;
    }
    ordered_json j;
    j["command"] = "spectrum";
    j["params"] = params_json(o.m);
    j["theta"] = o.theta;
    j["count"] = o.count;
    j["eigenvalues"] = ordered_json::array();
    j["laguerre_eigenvalues"] = ordered_json::array();
    j["indices"] = ordered_json::array();
    for (const auto& p : pts) {
        j["eigenvalues"].push_back(p.lambda);
        j["laguerre_eigenvalues"].push_back(p.laguerre_Lambda);
        j["indices"].push_back(nullable(p.index));
    }
    j["nonnegative_count"] = nonnegative_count(pts);
    emit_json(os, j);
}

void cmd_eigenfunction(const Options& o, std::ostream& os) {
    const auto ext = parse_theta(o.theta);
    if (o.n.has_value() == o.Lambda.has_value()) raise(ErrorCode::ConfigInvalid, "give exactly one of --n and --Lambda");
    CevSpectralPoint pt;
    std::optional<CevEigenfunction> ef;
    std::string theta_out = o.theta;
    if (o.n) {
        if (!ext.is_infinite()) raise(ErrorCode::ConfigInvalid, "--n selects the theta = inf polynomial branch");
        if (*o.n < 0) raise(ErrorCode::ConfigInvalid, "n must be >= 0");
        const auto pts = cev_spectrum(o.m, ext, SpectrumWindow::first(*o.n + 1));
        ef.emplace(cev_eigenfunction(o.m, ext, pts.back(), o.c));
    } else {
        // Psi-branch at a chosen Lambda; its extension value is m_a(Lambda).
        if (!ext.is_infinite()) check_extension(o.m, ext);
        else check_extension(o.m, Extension::finite(0.0));
        const double implied = weyl_m(a_of_gamma(o.m.gamma), *o.Lambda);
        if (!ext.is_infinite() && std::abs(implied - ext.theta()) > 1e-8 * std::max(1.0, std::abs(implied)))
            raise(ErrorCode::ConfigInvalid, "Lambda is not an eigenvalue of the given theta: m_a(Lambda) = " +
                                                format_number(implied));
        theta_out = format_number(implied);
        pt.laguerre_Lambda = *o.Lambda;
        pt.lambda = cev_lambda_from_Lambda(o.m, *o.Lambda);
        ef.emplace(o.m, pt, o.c);
    }
    const auto grid = parse_grid(o.grid, o.log_grid).points();
    std::vector<std::array<double, 4>> rows;
    for (double x : grid) {
        const Jet j = ef->jet(x);
        rows.push_back({x, j.value, j.d1, eigen_residual(*ef, x)});
    }
    if (o.format == "csv") {
        std::map<std::string, std::string> extra{{"theta", theta_out}, {"c", format_number(o.c)},
                                                 {"lambda", format_number(ef->lambda())},
                                                 {"Lambda", format_number(ef->Lambda())}};
        if (o.n) extra["n"] = std::to_string(*o.n);
        CsvWriter w(os, params_comment(o.m, extra), {"x", "p", "dp", "residual"});
        for (const auto& r : rows) w.row({r[0], r[1], r[2], r[3]});
        return;
    }
    ordered_json j;
    j["command"] = "eigenfunction";
    j["params"] = params_json(o.m);
    j["theta"] = theta_out;
    j["n"] = nullable(o.n);
    j["Lambda"] = ef->Lambda();
    j["lambda"] = ef->lambda();
    j["c"] = o.c;
    j["points"] = ordered_json::array();
    for (const auto& r : rows) j["points"].push_back({{"x", r[0]}, {"p", r[1]}, {"dp", r[2]}, {"residual", r[3]}});
    emit_json(os, j);
}

void cmd_classify(const Options& o, std::ostream& os) {
    o.m.validate();
    ordered_json j;
    j["command"] = "classify";
    j["params"] = params_json(o.m);
    j["regime"] = regime_json(o.m);
    if (o.m.gamma != 2.0) {
        const auto d = derive_params(o.m);
        j["derived"] = {{"beta", d.beta()}, {"alpha", d.alpha()}, {"eta", d.eta()}, {"nu", d.nu()}, {"a", d.a()},
                        {"delta", d.delta()}};
    } else {
        const auto d = derive_params(o.m);
        j["derived"] = {{"beta", d.beta()}, {"alpha", d.alpha()}, {"eta", d.eta()}, {"q", d.q()}};
    }
    emit_json(os, j);
}

void cmd_weight(const Options& o, std::ostream& os) {
    o.m.validate();
    const auto d = derive_params(o.m);
    const auto grid = parse_grid(o.grid, o.log_grid).points();
    if (o.format == "csv") {
        CsvWriter w(os, params_comment(o.m), {"x", "w"});
        for (double x : grid) w.row({x, cev_weight(d, x)});
        return;
    }
    ordered_json j;
    j["command"] = "weight";
    j["params"] = params_json(o.m);
    j["x"] = grid;
    std::vector<double> w;
    for (double x : grid) w.push_back(cev_weight(d, x));
    j["w"] = w;
    emit_json(os, j);
}

void cmd_doob(const Options& o, std::ostream& os) {
    const HarmonicFunction h(o.m);
    const auto grid = parse_grid(o.grid, o.log_grid).points();
    std::vector<std::array<double, 4>> rows;
    for (double x : grid) rows.push_back({x, h.value(x), h.derivative(x), doob_drift(o.m, h, x)});
    if (o.format == "csv") {
        CsvWriter w(os, params_comment(o.m), {"x", "h", "h_prime", "drift_addon"});
        for (const auto& r : rows) w.row({r[0], r[1], r[2], r[3]});
        return;
    }
    ordered_json j;
    j["command"] = "doob";
    j["params"] = params_json(o.m);
    j["points"] = ordered_json::array();
    for (const auto& r : rows)
        j["points"].push_back({{"x", r[0]}, {"h", r[1]}, {"h_prime", r[2]}, {"drift_addon", r[3]}});
    emit_json(os, j);
}

void cmd_laguerre_spectrum(const Options& o, std::ostream& os) {
    const auto ext = parse_theta(o.theta);
    SpectrumWindow window;
    std::string window_desc;
    if (!o.window.empty()) {
        const auto colon = o.window.find(':');
        double lo = 0, hi = 0;
        try {
            if (colon == std::string::npos) throw std::invalid_argument("no colon");
            std::size_t used = 0;
            lo = std::stod(o.window.substr(0, colon), &used);
            if (used != colon) throw std::invalid_argument("trailing");
            hi = std::stod(o.window.substr(colon + 1), &used);
            if (used != o.window.size() - colon - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            raise(ErrorCode::ConfigInvalid, "window must be lo:hi");
        }
        if (!(hi > lo)) raise(ErrorCode::ConfigInvalid, "window needs lo < hi");
        window = SpectrumWindow::between(lo, hi);
        window_desc = format_number(lo) + ":" + format_number(hi);
    } else {
        if (o.count < 1) raise(ErrorCode::ConfigInvalid, "count must be >= 1");
        window = SpectrumWindow::first(o.count);
    }
    const auto spec = laguerre_spectrum(o.a, ext, window);
    if (o.format == "csv") {
        std::ostringstream c;
        c << "params a=" << format_number(o.a) << " theta=" << o.theta;
        if (window_desc.empty()) c << " count=" << o.count;
        else c << " window=" << window_desc;
        CsvWriter w(os, c.str(), {"index", "Lambda", "residual"});
        for (const auto& p : spec.points) w.row({p.index ? static_cast<double>(*p.index) : NAN, p.value, p.residual});
        return;
    }
    ordered_json j;
    j["command"] = "laguerre-spectrum";
    j["params"] = {{"a", o.a}, {"theta", o.theta}};
    if (window_desc.empty()) j["params"]["count"] = o.count;
    else j["params"]["window"] = window_desc;
    j["a"] = o.a;
    j["theta"] = o.theta;
    j["eigenvalues"] = ordered_json::array();
    j["sources"] = ordered_json::array();
    j["points"] = ordered_json::array();
    for (const auto& p : spec.points) {
        j["eigenvalues"].push_back(p.value);
        j["sources"].push_back(p.source == SpectralSource::WeylRoot ? "weyl_root" : "polynomial");
        j["points"].push_back({{"Lambda", p.value},
                               {"index", nullable(p.index)},
                               {"source", p.source == SpectralSource::WeylRoot ? "weyl_root" : "polynomial"},
                               {"residual", p.residual}});
    }
    j["poles_in_window"] = spec.poles_in_window;
    j["sign_changes"] = spec.sign_changes;
    emit_json(os, j);
}

void cmd_simulate(const Options& o, std::ostream& os) {
    const auto cfg = sim_config(o, Measure::Physical);
    const auto ens = simulate(o.m, cfg);
    if (o.format == "csv") {
        std::ostringstream c;
        c << params_comment(o.m) << " paths=" << cfg.n_paths << " dt=" << format_number(cfg.dt)
          << " T=" << format_number(cfg.T) << " seed=" << cfg.seed << " measure=" << to_string(cfg.measure)
          << " scheme=" << to_string(cfg.scheme) << " antithetic=" << (cfg.antithetic ? 1 : 0);
        CsvWriter w(os, c.str(), {"path", "terminal", "absorption_time", "Z"});
        for (std::size_t i = 0; i < ens.terminal.size(); ++i)
            w.row({static_cast<double>(i), ens.terminal[i], ens.absorption_time[i].value_or(NAN), ens.density_Z[i]});
        return;
    }
    auto mean_terminal = estimate_json("simulate", o.m, cfg, [&] {
        EstimateCI e;
        const double n = static_cast<double>(ens.terminal.size());
        e.point = pairwise_sum(ens.terminal.data(), ens.terminal.size()) / n;
        std::vector<double> sq(ens.terminal.size());
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (ens.terminal[i] - e.point) * (ens.terminal[i] - e.point);
        e.std_error = n > 1 ? std::sqrt(pairwise_sum(sq.data(), sq.size()) / (n - 1) / n) : 0.0;
        e.n_effective = static_cast<std::int64_t>(n);
        e.note = "estimate is the mean terminal value";
        return e;
    }());
    mean_terminal["diagnostics"]["absorbed_paths"] = ens.absorbed_count();
    mean_terminal["diagnostics"]["clamp_events"] = ens.clamp_events;
    mean_terminal["diagnostics"]["total_steps"] = ens.total_steps;
    emit_json(os, mean_terminal);
}

void cmd_martingale_defect(const Options& o, std::ostream& os) {
    const auto cfg = sim_config(o, Measure::RiskNeutral);
    emit_json(os, estimate_json("martingale-defect", o.m, cfg, martingale_defect(o.m, cfg)));
}

void cmd_absorption(const Options& o, std::ostream& os) {
    const auto cfg = sim_config(o, Measure::Physical);
    emit_json(os, estimate_json("absorption", o.m, cfg, absorption_probability(o.m, cfg)));
}

void cmd_doob_check(const Options& o, std::ostream& os) {
    const auto cfg = sim_config(o, Measure::Physical);
    const auto r = doob_law_check(o.m, cfg);
    ordered_json j;
    j["command"] = "doob-check";
    j["params"] = params_json(o.m);
    j["simulation"] = sim_json(cfg);
    j["ks_statistic"] = r.ks_statistic;
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    j["n_effective"] = r.n_effective;
    j["control"] = {{"ks_statistic", r.control_ks_statistic},
                    {"threshold", r.control_threshold},
                    {"pass", r.control_pass}};
    emit_json(os, j);
}

void cmd_specfun_eval(const Options& o, std::ostream& os) {
    const int n = o.n.value_or(0);
    const double L = o.Lambda.value_or(0.0);
    double v = 0.0;
    if (o.fn == "laguerre") v = laguerre(n, o.a, o.y);
    else if (o.fn == "kummer-phi") v = kummer_phi(L, o.b, o.y);
    else if (o.fn == "tricomi-psi") v = tricomi_psi(L, o.b, o.y);
    else if (o.fn == "weyl-m") v = weyl_m(o.a, L);
    else if (o.fn == "log-gamma") v = log_gamma(o.y).log_abs;
    else if (o.fn == "digamma") v = digamma(o.y);
    else raise(ErrorCode::ConfigInvalid, "unknown function '" + o.fn + "'");
    ordered_json j;
    j["command"] = "specfun-eval";
    j["function"] = o.fn;
    j["args"] = {{"n", n}, {"a", o.a}, {"Lambda", L}, {"b", o.b}, {"y", o.y}};
    j["value"] = v;
    emit_json(os, j);
}

void cmd_figure_data(const Options& o, std::ostream& os) {
    namespace fs = std::filesystem;
    fs::create_directories(o.out_dir);
    ordered_json manifest;
    manifest["command"] = "figure-data";
    manifest["which"] = o.which;
    manifest["params"] = params_json(o.m);
    manifest["files"] = ordered_json::array();
    auto write = [&](const std::string& name, const std::string& body) {
        const auto path = fs::path(o.out_dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) raise(ErrorCode::ConfigInvalid, "cannot write " + path.string());
        f << body;
        manifest["files"].push_back(name);
    };
    if (o.which == "weights") {
        const auto grid = parse_grid(o.grid, o.log_grid).points();
        for (double g : {0.5, 1.0, 1.5, 1.8, 2.5, 3.0, 3.5, 4.0}) {
            ModelParams m = o.m;
            m.gamma = g;
            m.validate();
            const auto d = derive_params(m);
            std::ostringstream body;
            CsvWriter w(body, params_comment(m), {"x", "w"});
            for (double x : grid) w.row({x, cev_weight(d, x)});
            write("weight_gamma_" + format_number(g) + ".csv", body.str());
        }
    } else if (o.which == "regime_chart") {
        ordered_json arr = ordered_json::array();
        for (int i = 1; i <= 40; ++i) {
            ModelParams m = o.m;
            m.gamma = i / 10.0;
            arr.push_back(regime_json(m));
        }
        for (double g : {0.5, 1.5, 2.5, 3.0}) {
            ModelParams m = o.m;
            m.gamma = g;
            if (std::none_of(arr.begin(), arr.end(), [g](const auto& r) { return r["gamma"] == g; }))
                arr.push_back(regime_json(m));
        }
        std::sort(arr.begin(), arr.end(),
                  [](const auto& x, const auto& y) { return x["gamma"].template get<double>() < y["gamma"].template get<double>(); });
        ordered_json j;
        j["command"] = "figure-data";
        j["which"] = "regime_chart";
        j["params"] = params_json(o.m);
        j["regimes"] = arr;
        write("regime_chart.json", j.dump(2) + "\n");
    } else {
        raise(ErrorCode::ConfigInvalid, "which must be weights or regime_chart");
    }
    emit_json(os, manifest);
}

struct CommandSpec {
    const char* name;
    const char* help;
    Command fn;
    bool model, theta, count, eig, grid, sim, specfun, figure, laguerre_a;
};

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> c{
        {"spectrum", "eigenvalues of the Fokker-Planck operator", cmd_spectrum, 1, 1, 1, 0, 0, 0, 0, 0, 0},
        {"eigenfunction", "eigenfunction values on a grid", cmd_eigenfunction, 1, 1, 0, 1, 1, 0, 0, 0, 0},
        {"classify", "regime, endpoint and arbitrage classification", cmd_classify, 1, 0, 0, 0, 0, 0, 0, 0, 0},
        {"weight", "weight function on a grid", cmd_weight, 1, 0, 0, 0, 1, 0, 0, 0, 0},
        {"doob", "harmonic function and conditioning drift on a grid", cmd_doob, 1, 0, 0, 0, 1, 0, 0, 0, 0},
        {"laguerre-spectrum", "spectrum of the Laguerre operator", cmd_laguerre_spectrum, 0, 1, 1, 0, 0, 0, 0, 0, 1},
        {"simulate", "simulate paths", cmd_simulate, 1, 0, 0, 0, 0, 1, 0, 0, 0},
        {"martingale-defect", "x0 - E[exp(-rT) X_T] under the risk-neutral measure", cmd_martingale_defect, 1, 0, 0,
         0, 0, 1, 0, 0, 0},
        {"absorption", "probability of absorption at 0 by T", cmd_absorption, 1, 0, 0, 0, 0, 1, 0, 0, 0},
        {"doob-check", "law check of the conditioned dynamics", cmd_doob_check, 1, 0, 0, 0, 0, 1, 0, 0, 0},
        {"specfun-eval", "evaluate a special function", cmd_specfun_eval, 0, 0, 0, 0, 0, 0, 1, 0, 0},
        {"figure-data", "write figure data files", cmd_figure_data, 1, 0, 0, 0, 1, 0, 0, 1, 0},
    };
    return c;
}

// Injects config-file values as "--key=value" ahead of the explicit flags for
// keys not given on the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream f(path);
    if (!f) raise(ErrorCode::ConfigInvalid, "cannot read config file " + path);
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) raise(ErrorCode::ConfigInvalid, "config must be a JSON object");
    auto given = [&](const std::string& key) {
        for (std::size_t i = 1; i < args.size(); ++i)
            if (args[i] == "--" + key || args[i].rfind("--" + key + "=", 0) == 0) return true;
        return false;
    };
    std::vector<std::string> injected;
    for (const auto& [key, val] : cfg.items()) {
        if (key == "config") raise(ErrorCode::ConfigInvalid, "config files cannot nest");
        if (given(key)) continue;
        std::string s;
        if (val.is_number_float()) s = format_number(val.get<double>());
        else if (val.is_number_integer()) s = std::to_string(val.get<std::int64_t>());
        else if (val.is_number_unsigned()) s = std::to_string(val.get<std::uint64_t>());
        else if (val.is_boolean()) s = val.get<bool>() ? "true" : "false";
        else if (val.is_string()) s = val.get<std::string>();
        else raise(ErrorCode::ConfigInvalid, "config value for '" + key + "' must be a scalar");
        injected.push_back("--" + key + "=" + s);
    }
    std::vector<std::string> out;
    if (args.size() < 2) return args;
    out.push_back(args[0]);
    out.push_back(args[1]);
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

void fail_line(std::ostream& err, const std::string& code, const std::string& message) {
    std::string msg = message;
    for (auto& ch : msg)
        if (ch == '\n' || ch == '\r') ch = ' ';
    err << "error: code=" << code << " message=" << msg << '\n';
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Spectral toolkit for the CEV Fokker-Planck operator"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    std::map<std::string, CLI::App*> subs;
    for (const auto& c : commands()) {
        auto* s = app.add_subcommand(c.name, c.help);
        subs[c.name] = s;
        s->add_option("--config", o.config, "JSON file with flag values (flags win)");
        s->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--out", o.out_path, "write output to this file");
        if (c.model) {
            s->add_option("--gamma", o.m.gamma, "elasticity gamma");
            s->add_option("--mu", o.m.mu, "drift mu");
            s->add_option("--sigma", o.m.sigma, "volatility sigma");
            s->add_option("--r", o.m.r, "interest rate r");
            s->add_option("--x0", o.m.x0, "initial value");
        }
        if (c.theta) s->add_option("--theta", o.theta, "extension parameter: inf or a real");
        if (c.count) s->add_option("--count", o.count, "number of eigenvalues");
        if (c.laguerre_a) {
            s->add_option("--a", o.a, "Laguerre parameter a");
            s->add_option("--window", o.window, "Lambda range lo:hi (replaces --count)");
        }
        if (c.eig) {
            s->add_option("--n", o.n, "polynomial-branch index");
            s->add_option("--Lambda", o.Lambda, "Laguerre eigenvalue for the Psi-branch");
            s->add_option("--c", o.c, "normalisation constant");
        }
        if (c.grid) {
            s->add_option("--grid", o.grid, "lo:hi:steps");
            s->add_flag("--log-grid", o.log_grid, "geometric grid spacing");
        }
        if (c.sim) {
            s->add_option("--paths", o.paths, "number of paths");
            s->add_option("--dt", o.dt, "time step");
            s->add_option("--T", o.T, "horizon");
            s->add_option("--seed", o.seed, "RNG seed");
            s->add_option("--measure", o.measure, "physical or risk-neutral");
            s->add_option("--scheme", o.scheme, "euler or milstein");
            s->add_flag("--antithetic", o.antithetic, "antithetic pairs");
            s->add_option("--threads", o.threads, "worker threads (0 = all cores)");
        }
        if (c.specfun) {
            s->add_option("--fn", o.fn, "laguerre|kummer-phi|tricomi-psi|weyl-m|log-gamma|digamma");
            s->add_option("--n", o.n, "degree");
            s->add_option("--a", o.a, "parameter a");
            s->add_option("--Lambda", o.Lambda, "parameter Lambda");
            s->add_option("--b", o.b, "parameter b");
            s->add_option("--y", o.y, "argument");
        }
        if (c.figure) {
            s->add_option("--which", o.which, "weights or regime_chart");
            s->add_option("--out-dir", o.out_dir, "output directory");
        }
    }
    try {
        auto args = merge_config(raw_args);
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::ParseError& e) {
            fail_line(err, "ConfigInvalid", e.what());
            return 2;
        }
        const CommandSpec* chosen = nullptr;
        for (const auto& c : commands())
            if (subs[c.name]->parsed()) chosen = &c;
        if (!chosen) raise(ErrorCode::ConfigInvalid, "no subcommand");
        std::ostringstream buffer;
        chosen->fn(o, buffer);
        if (!o.out_path.empty()) {
            std::ofstream f(o.out_path, std::ios::binary);
            if (!f) raise(ErrorCode::ConfigInvalid, "cannot write " + o.out_path);
            f << buffer.str();
        } else {
            out << buffer.str();
        }
        return 0;
    } catch (const Error& e) {
        fail_line(err, std::string(to_string(e.code())), e.detail());
        return is_validation_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        fail_line(err, "Internal", e.what());
        return 3;
    }
}

}  // namespace cev::cli
