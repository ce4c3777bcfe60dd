#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "kg/experiments.hpp"

using namespace kg;

TEST_CASE("line fit recovers exact slopes and flags degenerate input") {
    std::vector<double> x{1, 2, 3, 4}, y{3.5, 5.5, 7.5, 9.5};
    auto fit = fit_line(x, y);
    CHECK(fit.valid);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.5));
    CHECK(fit.r2 == doctest::Approx(1.0));

    auto bad = fit_line({1.0}, {2.0});
    CHECK_FALSE(bad.valid);
    auto flat = fit_line({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0});
    CHECK_FALSE(flat.valid);
}

TEST_CASE("seed data: positive sigma and finite support radius") {
    Grid g = make_grid(1024, 64.0 * M_PI);
    const double sigma = seed_sigma(g);
    CHECK(sigma > 0.0);
    CHECK(sigma == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-8));
    const double radius = seed_support_radius(g);
    CHECK(radius > 4.0);
    CHECK(radius < 12.0);
}

TEST_CASE("dispersion decay on the default grid fits a -1/2 slope at k=0") {
    // the k-projection kernel has Gevrey tails; boxes below ~256 pi leave
    // edge mass above the 1e-8 wrap guard even at t = 0
    ConfigFile cfg;
    cfg.experiment.fit_lo = 5.0;
    cfg.experiment.fit_hi = 40.0;
    auto rep = dispersion_decay(cfg, {0});
    REQUIRE(rep.per_k.size() == 1);
    CHECK_FALSE(rep.per_k[0].wrap_aborted);
    CHECK(rep.full_fit.valid);
    MESSAGE("full-field slope: ", rep.full_fit.slope, "; k=0 constant: ", rep.per_k[0].constant);
    CHECK(rep.full_fit.slope == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(rep.per_k[0].constant > 0.0);
    CHECK(rep.sup_t0 > 0.0);
}

TEST_CASE("dispersion decay aborts the fit on wrap-around") {
    ConfigFile cfg;
    cfg.grid.n = 256;
    cfg.grid.box_length = 8.0 * M_PI;  // tiny box: waves wrap quickly
    cfg.evolution.horizon = 100.0;
    cfg.experiment.fit_lo = 5.0;
    cfg.experiment.fit_hi = 90.0;
    auto rep = dispersion_decay(cfg, {0});
    CHECK(rep.per_k[0].wrap_aborted);
    CHECK_FALSE(rep.per_k[0].fit.valid);
    CHECK_FALSE(rep.full_fit.valid);
}

TEST_CASE("nonlinear decay: zero epsilon is skipped, small run fits") {
    ConfigFile cfg;
    cfg.grid.n = 1024;
    cfg.grid.box_length = 64.0 * M_PI;
    cfg.evolution.dt = 0.05;
    cfg.evolution.horizon = 40.0;
    cfg.evolution.snapshot_stride = 5;
    cfg.experiment.fit_lo = 5.0;
    cfg.experiment.fit_hi = 40.0;
    auto out = nonlinear_decay(cfg, {0.05, 0.025, 0.0});
    REQUIRE(out.size() == 3);
    CHECK(out[0].status == RunStatus::completed);
    CHECK(out[0].fit.valid);
    MESSAGE("decay slope at eps=0.05 over [5,40]: ", out[0].fit.slope);
    CHECK(out[0].fit.slope < -0.3);
    CHECK(out[0].c_eps > 0.0);
    // rate is robust under halving epsilon
    CHECK(std::abs(out[0].fit.slope - out[1].fit.slope) < 0.1);
    CHECK_FALSE(out[2].fit.valid);  // eps = 0 -> skipped
}

TEST_CASE("znorm tracking: free flow keeps the profile Z-norm constant") {
    ConfigFile cfg;
    cfg.grid.n = 1024;
    cfg.grid.box_length = 64.0 * M_PI;
    cfg.evolution.F = "none";
    cfg.evolution.epsilon = 0.05;
    cfg.evolution.dt = 0.05;
    cfg.evolution.horizon = 10.0;
    cfg.evolution.snapshot_stride = 20;
    cfg.experiment.fit_lo = 1.0;
    cfg.experiment.fit_hi = 9.0;
    auto rep = znorm_tracking(cfg);
    CHECK(rep.status == RunStatus::completed);
    CHECK(rep.initial > 0.0);
    CHECK(rep.max_ratio == doctest::Approx(1.0).epsilon(5e-9));
    CHECK(rep.within_bound);
}

TEST_CASE("lifespan scan censors runs that cannot cross within budget") {
    ConfigFile cfg;
    cfg.grid.n = 512;
    cfg.grid.box_length = 32.0 * M_PI;
    cfg.evolution.F = "dtu_sq_dxu";
    cfg.evolution.dt = 0.05;
    cfg.evolution.snapshot_stride = 50;
    cfg.experiment.eps_list = {0.3};       // tiny epsilon cannot cross in a tiny budget
    cfg.experiment.time_budget = 1.0;      // artificially small
    cfg.experiment.fit_lo = 0.1;
    cfg.experiment.fit_hi = 0.9;
    cfg.evolution.horizon = 1.0;
    auto rep = lifespan_scan(cfg);
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.entries[0].censored);
    CHECK(rep.entries[0].censor_time == doctest::Approx(1.0));
    CHECK_FALSE(rep.fit.valid);  // censored entries never enter the fit
}

TEST_CASE("lifespan scan requires the blow-up nonlinearity") {
    ConfigFile cfg;
    cfg.evolution.F = "u_squared";
    CHECK_THROWS_AS(lifespan_scan(cfg), std::invalid_argument);
}

TEST_CASE("run directories never overwrite and write the config echo") {
    ConfigFile cfg;
    cfg.experiment.output_dir = "/tmp/kg_test_runs";
    std::filesystem::remove_all(cfg.experiment.output_dir);
    const std::string d1 = make_run_dir(cfg, "demo");
    const std::string d2 = make_run_dir(cfg, "demo");
    CHECK(d1 != d2);
    CHECK(std::filesystem::exists(d1 + "/config.json"));
    CHECK(std::filesystem::exists(d2 + "/config.json"));
    std::ifstream in(d1 + "/config.json");
    std::stringstream ss;
    ss << in.rdbuf();
    auto reparsed = parse_config_text(ss.str());
    CHECK(reparsed.to_json() == cfg.to_json());
    std::filesystem::remove_all(cfg.experiment.output_dir);
}

TEST_CASE("norms csv uses the documented header and full precision") {
    Grid g = make_grid(64, 16.0);
    Field U0 = half_kg_data(sample_real(g, [](double x) { return 0.1 * std::exp(-x * x); }),
                            Field(g));
    IntegrateOptions opts;
    opts.snapshot_stride = 2;
    Trajectory traj = integrate(U0, NonlinearitySpec::none(), 0.2, 0.02, 10.0, opts);
    const std::string path = "/tmp/kg_test_norms.csv";
    write_norms_csv(path, traj);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,hN,w1inf,z_alpha,sup_lambda_u_ut");
    std::string row;
    std::getline(in, row);
    CHECK(row.find(",") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("determinism: identical config and seed give a bit-identical norms.csv") {
    Grid g = make_grid(512, 32.0 * M_PI);
    Field U0 = half_kg_data(cplx(0.05, 0.0) * seed_u0_profile(g),
                            cplx(0.05, 0.0) * seed_u1_profile(g));
    IntegrateOptions opts;
    opts.snapshot_stride = 10;
    opts.store_fields = false;
    opts.with_znorm = true;
    auto run_csv = [&](const std::string& path) {
        Trajectory tr = integrate(U0, NonlinearitySpec::u_squared(), 5.0, 0.05, 10.0, opts);
        write_norms_csv(path, tr);
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = run_csv("/tmp/kg_det_a.csv");
    const std::string b = run_csv("/tmp/kg_det_b.csv");
    CHECK(a == b);
    CHECK(a.size() > 100);
    std::filesystem::remove("/tmp/kg_det_a.csv");
    std::filesystem::remove("/tmp/kg_det_b.csv");
}

TEST_CASE("profile Z-norm growth ratio is ordered in epsilon at matched times") {
    ConfigFile cfg;
    cfg.grid.n = 1024;
    cfg.grid.box_length = 64.0 * M_PI;
    cfg.evolution.dt = 0.05;
    cfg.evolution.horizon = 30.0;
    cfg.evolution.snapshot_stride = 100;
    cfg.experiment.fit_lo = 1.0;
    cfg.experiment.fit_hi = 29.0;
    auto run = [&](double eps) {
        ConfigFile c = cfg;
        c.evolution.epsilon = eps;
        return znorm_tracking(c);
    };
    auto lo = run(0.025);
    auto hi = run(0.05);
    REQUIRE(lo.series.size() == hi.series.size());
    for (std::size_t i = 0; i < lo.series.size(); ++i) {
        const double rlo = lo.series[i].second / lo.initial;
        const double rhi = hi.series[i].second / hi.initial;
        CHECK(rlo <= rhi * (1.0 + 1e-6));
    }
}

TEST_CASE("nonlinear decay refuses fits beyond the no-wrap budget") {
    ConfigFile cfg;
    cfg.grid.n = 256;
    cfg.grid.box_length = 16.0 * M_PI;  // L/4 ~ 12.6
    cfg.evolution.horizon = 40.0;
    cfg.experiment.fit_lo = 1.0;
    cfg.experiment.fit_hi = 39.0;
    auto out = nonlinear_decay(cfg, {0.05});
    REQUIRE(out.size() == 1);
    CHECK_FALSE(out[0].fit.valid);
    CHECK(out[0].fit.note.find("no-wrap") != std::string::npos);
}
