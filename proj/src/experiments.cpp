#include "kg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>

#include "json.hpp"

namespace kg {

namespace {

double pow2d(double k) { return std::exp2(k); }

// Fraction of L^2 mass within the outer 10% of the box (wrap-around guard).
double edge_mass_fraction(const Field& f) {
    const double edge = 0.45 * f.grid.box_length();
    double total = 0.0, outer = 0.0;
    for (std::size_t p = 0; p < f.size(); ++p) {
        const double e = std::norm(f.v[p]);
        total += e;
        if (std::abs(f.grid.x(p)) > edge) outer += e;
    }
    return total > 0.0 ? outer / total : 0.0;
}

std::vector<double> log_spaced_times(double lo, double hi, std::size_t count) {
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(count - 1);
        out.push_back(std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))));
    }
    return out;
}

}  // namespace

FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    FitResult r;
    r.points = x.size();
    if (x.size() != y.size() || x.size() < 2) {
        r.note = "need at least two points";
        return r;
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-30) {
        r.note = "degenerate abscissae";
        return r;
    }
    r.slope = (n * sxy - sx * sy) / det;
    r.intercept = (sy - r.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (r.intercept + r.slope * x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
        r.residual_max = std::max(r.residual_max, std::abs(e));
    }
    r.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (x.size() > 2) r.slope_stderr = std::sqrt(ss_res / (n - 2.0) / (sxx - sx * sx / n));
    r.valid = true;
    return r;
}

Field seed_u0_profile(const Grid& g) {
    return sample_real(g, [](double x) { return std::exp(-x * x); });
}

Field seed_u1_profile(const Grid& g) {
    return sample_real(g, [](double x) { return -2.0 * x * std::exp(-x * x); });
}

double seed_sigma(const Grid& g) {
    Field u0 = seed_u0_profile(g);
    Field du0 = apply_symbol(u0, [](double xi) { return cplx(0.0, xi); });
    Field u1 = seed_u1_profile(g);
    double acc = 0.0;
    for (std::size_t p = 0; p < g.n(); ++p) acc += du0.v[p].real() * u1.v[p].real();
    return acc * g.dx();
}

double seed_support_radius(const Grid& g) {
    Field u0 = seed_u0_profile(g);
    Field u1 = seed_u1_profile(g);
    double radius = 0.0;
    for (std::size_t p = 0; p < g.n(); ++p) {
        const double amp = std::max(std::abs(u0.v[p].real()), std::abs(u1.v[p].real()));
        if (amp > 1e-14) radius = std::max(radius, std::abs(g.x(p)));
    }
    return radius;
}

DispersionReport dispersion_decay(const ConfigFile& cfg, const std::vector<int>& ks) {
    const Grid g = make_grid(cfg.grid.n, cfg.grid.box_length);
    // Two Gaussian widths: the unit-width packet carries the headline decay
    // exponent (its sup rides the xi ~ 0 stationary point, asymptotic within
    // the window); the half-width packet keeps spectral mass in the k = 0..3
    // annuli for the constant sweep.
    Field f_wide = sample_real(g, [](double x) { return std::exp(-x * x); });
    Field f = sample_real(g, [](double x) { return std::exp(-2.0 * x * x); });

    DispersionReport rep;
    const auto times = log_spaced_times(std::max(cfg.experiment.fit_lo, 1e-3),
                                        cfg.experiment.fit_hi, 40);

    rep.sup_t0 = norm_linf(f_wide);
    {
        std::vector<double> xs, ys;
        bool wrapped = false;
        for (double t : times) {
            Field evolved = propagate(f_wide, t, +1);
            if (edge_mass_fraction(evolved) > 1e-8) { wrapped = true; break; }
            xs.push_back(std::log1p(t));
            ys.push_back(std::log(norm_linf(evolved)));
        }
        if (!wrapped) rep.full_fit = fit_line(xs, ys);
        else rep.full_fit.note = "wrap-around detected: mass near box edge above 1e-8";
    }

    for (int k : ks) {
        DispersionKResult kr;
        kr.k = k;
        Field pk = project_freq(f, k);
        const double l1 = norm_l1(pk);
        if (l1 <= 0.0) {
            kr.fit.note = "empty annulus";
            rep.per_k.push_back(kr);
            continue;
        }
        std::vector<double> xs, ys;
        for (double t : times) {
            Field evolved = propagate(pk, t, +1);
            if (edge_mass_fraction(evolved) > 1e-8) {
                kr.wrap_aborted = true;
                break;
            }
            const double sup = norm_linf(evolved);
            xs.push_back(std::log1p(t));
            ys.push_back(std::log(sup));
            kr.constant = std::max(kr.constant,
                                   sup * std::sqrt(1.0 + t) / (pow2d(1.5 * k) * l1));
        }
        if (!kr.wrap_aborted) kr.fit = fit_line(xs, ys);
        else kr.fit.note = "wrap-around detected: mass near box edge above 1e-8";
        rep.per_k.push_back(kr);
    }
    return rep;
}

namespace {

NonlinearitySpec nonlinearity_from_tag(const std::string& tag) {
    if (tag == "u_squared") return NonlinearitySpec::u_squared();
    if (tag == "dtu_sq_dxu") return NonlinearitySpec::dtu_sq_dxu();
    if (tag == "none") return NonlinearitySpec::none();
    throw std::invalid_argument("unknown nonlinearity tag \"" + tag + "\"");
}

struct PreparedRun {
    Field U0;
    double sup0 = 0.0;
    double threshold = 0.0;
};

PreparedRun prepare_run(const ConfigFile& cfg, const Grid& g, double eps) {
    PreparedRun pr;
    Field u0 = cplx(eps, 0.0) * seed_u0_profile(g);
    Field u1 = cplx(eps, 0.0) * seed_u1_profile(g);
    pr.U0 = half_kg_data(u0, u1);
    for (const auto& z : pr.U0.v)
        pr.sup0 = std::max(pr.sup0, std::max(std::abs(z.real()), std::abs(z.imag())));
    ConfigFile tmp = cfg;
    tmp.evolution.epsilon = eps;
    pr.threshold = resolved_blowup_threshold(tmp, pr.sup0);
    return pr;
}

}  // namespace

std::vector<DecayResult> nonlinear_decay(const ConfigFile& cfg, const std::vector<double>& eps_list) {
    const Grid g = make_grid(cfg.grid.n, cfg.grid.box_length);
    const auto F = nonlinearity_from_tag(cfg.evolution.F);
    std::vector<DecayResult> out;
    for (double eps : eps_list) {
        DecayResult res;
        res.epsilon = eps;
        if (cfg.evolution.horizon > 0.25 * g.box_length()) {
            res.fit.note = "horizon exceeds the no-wrap budget t <= L/4; fit skipped";
            out.push_back(res);
            continue;
        }
        if (eps == 0.0) {
            res.fit.note = "zero data: identically zero run, fit skipped";
            out.push_back(res);
            continue;
        }
        auto pr = prepare_run(cfg, g, eps);
        IntegrateOptions opts;
        opts.snapshot_stride = cfg.evolution.snapshot_stride;
        opts.store_fields = false;
        opts.with_znorm = false;
        opts.norm_N = cfg.norms.N;
        opts.aliasing_tol = cfg.evolution.aliasing_tol;
        Trajectory traj = integrate(pr.U0, F, cfg.evolution.horizon, cfg.evolution.dt,
                                    pr.threshold, opts);
        res.status = traj.status;
        if (traj.status != RunStatus::completed) {
            res.fit.note = "run ended early (" + to_string(traj.status) + "); fit skipped";
            out.push_back(res);
            continue;
        }
        std::vector<double> xs, ys;
        for (const auto& ns : traj.norms) {
            if (ns.t < cfg.experiment.fit_lo || ns.t > cfg.experiment.fit_hi) continue;
            if (ns.sup_lambda_u_ut <= 0.0) continue;
            xs.push_back(std::log1p(ns.t));
            ys.push_back(std::log(ns.sup_lambda_u_ut));
            res.c_eps = std::max(res.c_eps,
                                 ns.sup_lambda_u_ut * std::pow(1.0 + ns.t, cfg.norms.alpha) / eps);
        }
        res.fit = fit_line(xs, ys);
        out.push_back(res);
    }
    return out;
}

ZnormTrackReport znorm_tracking(const ConfigFile& cfg) {
    const Grid g = make_grid(cfg.grid.n, cfg.grid.box_length);
    const auto F = nonlinearity_from_tag(cfg.evolution.F);
    const double eps = cfg.evolution.epsilon;

    ZnormTrackReport rep;
    rep.epsilon = eps;
    if (eps == 0.0) {
        rep.initial = 0.0;
        rep.max_ratio = 0.0;
        return rep;
    }
    auto pr = prepare_run(cfg, g, eps);
    IntegrateOptions opts;
    opts.snapshot_stride = cfg.evolution.snapshot_stride;
    opts.store_fields = false;
    opts.with_znorm = true;
    opts.znorm_alpha = cfg.norms.alpha;
    opts.norm_N = cfg.norms.N;
    opts.aliasing_tol = cfg.evolution.aliasing_tol;
    Trajectory traj = integrate(pr.U0, F, cfg.evolution.horizon, cfg.evolution.dt, pr.threshold, opts);
    rep.status = traj.status;
    rep.initial = traj.norms.empty() ? 0.0 : traj.norms.front().z_alpha;
    for (const auto& ns : traj.norms) {
        rep.series.emplace_back(ns.t, ns.z_alpha);
        if (rep.initial > 0.0) rep.max_ratio = std::max(rep.max_ratio, ns.z_alpha / rep.initial);
    }
    if (eps <= cfg.experiment.eps_assert_below)
        rep.within_bound = rep.max_ratio <= cfg.experiment.r_max;
    return rep;
}

std::string LifespanReport::to_json() const {
    nlohmann::json doc;
    doc["sigma"] = sigma;
    doc["support_radius"] = support_radius;
    doc["monotone"] = monotone;
    doc["bound_respected"] = bound_respected;
    doc["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept},
                  {"slope_stderr", fit.slope_stderr}, {"r2", fit.r2},
                  {"points", fit.points}, {"valid", fit.valid}};
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : this->entries) {
        entries.push_back({{"epsilon", e.epsilon},
                           {"threshold", e.threshold},
                           {"t_star", e.t_star},
                           {"t_half", e.t_half},
                           {"censored", e.censored},
                           {"censor_time", e.censor_time},
                           {"upper_bound", e.upper_bound},
                           {"status", to_string(e.status)}});
    }
    doc["entries"] = entries;
    return doc.dump(2);
}

LifespanReport lifespan_scan(const ConfigFile& cfg, const std::string& persist_dir) {
    const Grid g = make_grid(cfg.grid.n, cfg.grid.box_length);
    if (cfg.evolution.F != "dtu_sq_dxu")
        throw std::invalid_argument("lifespan_scan: requires evolution.F = dtu_sq_dxu");
    LifespanReport rep;
    rep.sigma = seed_sigma(g);
    rep.support_radius = seed_support_radius(g);
    if (!(rep.sigma > 0.0))
        throw std::runtime_error("lifespan_scan: seed data has sigma <= 0; the blow-up bound does not apply");

    const auto F = nonlinearity_from_tag(cfg.evolution.F);

    auto run_one = [&](double eps) {
        LifespanEntry e;
        e.epsilon = eps;
        auto pr = prepare_run(cfg, g, eps);
        e.threshold = pr.threshold;
        e.upper_bound = rep.support_radius * std::expm1(2.0 / (rep.sigma * eps * eps));
        IntegrateOptions opts;
        opts.snapshot_stride = cfg.evolution.snapshot_stride;
        opts.store_fields = false;
        opts.with_znorm = false;
        opts.norm_N = cfg.norms.N;
        opts.aliasing_tol = cfg.evolution.aliasing_tol;
        opts.secondary_threshold = 0.5 * pr.threshold;
        Trajectory traj = integrate(pr.U0, F, cfg.experiment.time_budget, cfg.evolution.dt,
                                    pr.threshold, opts);
        e.status = traj.status;
        e.t_half = traj.t_secondary;
        if (traj.status == RunStatus::blow_up) {
            e.t_star = traj.t_blowup;
        } else {
            e.censored = true;
            e.censor_time = traj.t_end;
        }
        if (!persist_dir.empty()) {
            char sub[64];
            std::snprintf(sub, sizeof sub, "eps-%g", eps);
            const auto dir = std::filesystem::path(persist_dir) / sub;
            std::filesystem::create_directories(dir);
            write_norms_csv((dir / "norms.csv").string(), traj);
            write_status_json((dir / "status.json").string(), traj);
        }
        return e;
    };

    // Independent runs over a small worker pool.
    std::vector<std::future<LifespanEntry>> futures;
    futures.reserve(cfg.experiment.eps_list.size());
    for (double eps : cfg.experiment.eps_list)
        futures.push_back(std::async(std::launch::async, run_one, eps));
    for (auto& fu : futures) rep.entries.push_back(fu.get());

    std::vector<double> xs, ys;
    rep.monotone = true;
    rep.bound_respected = true;
    double prev_t = -1.0;
    for (const auto& e : rep.entries) {
        if (e.censored) continue;  // censored entries never enter the fit
        xs.push_back(1.0 / (e.epsilon * e.epsilon));
        ys.push_back(std::log(e.t_star));
        if (prev_t >= 0.0 && !(e.t_star > prev_t)) rep.monotone = false;
        prev_t = e.t_star;
        if (e.t_star > e.upper_bound) rep.bound_respected = false;
    }
    rep.fit = fit_line(xs, ys);
    return rep;
}

std::string make_run_dir(const ConfigFile& cfg, const std::string& tag) {
    namespace fs = std::filesystem;
    const std::string echo = cfg.to_json();
    const std::size_t h = std::hash<std::string>{}(echo + tag);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%08zx", h & 0xffffffffu);
    fs::path base = fs::path(cfg.experiment.output_dir) / (tag + "-" + hex);
    fs::path dir = base;
    if (fs::exists(dir)) {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        const auto stamp = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
        dir = fs::path(base.string() + "-" + std::to_string(stamp));
        int counter = 0;
        while (fs::exists(dir)) dir = fs::path(base.string() + "-" + std::to_string(stamp) + "." + std::to_string(counter++));
    }
    fs::create_directories(dir);
    write_text_file((dir / "config.json").string(), echo);
    return dir.string();
}

void write_norms_csv(const std::string& path, const Trajectory& traj) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) throw std::runtime_error("cannot open " + path);
    std::fputs("t,hN,w1inf,z_alpha,sup_lambda_u_ut\n", out);
    for (const auto& ns : traj.norms)
        std::fprintf(out, "%.17g,%.17g,%.17g,%.17g,%.17g\n", ns.t, ns.hN, ns.w1inf, ns.z_alpha,
                     ns.sup_lambda_u_ut);
    std::fclose(out);
}

void write_status_json(const std::string& path, const Trajectory& traj) {
    nlohmann::json doc;
    doc["status"] = to_string(traj.status);
    doc["t_end"] = traj.t_end;
    doc["t_blowup"] = traj.t_blowup;
    doc["t_secondary"] = traj.t_secondary;
    doc["threshold"] = traj.blowup_threshold;
    doc["max_tail_fraction"] = traj.max_tail_fraction;
    doc["dt"] = traj.dt;
    write_text_file(path, doc.dump(2));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << content;
}

}  // namespace kg
