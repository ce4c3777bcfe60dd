#include <random>

#include "doctest.h"
#include "kg/evolution.hpp"
#include "oracles.hpp"

using namespace kg;

namespace {

Field gaussian_data_U0(const Grid& g, double eps) {
    Field u0 = cplx(eps, 0.0) * sample_real(g, [](double x) { return std::exp(-x * x); });
    Field u1 = cplx(eps, 0.0) * sample_real(g, [](double x) { return -2.0 * x * std::exp(-x * x); });
    return half_kg_data(u0, u1);
}

Field half_kg_from_linear(const Grid& g, const Field& u0, const Field& u1, double t) {
    return linear_kg_velocity(u0, u1, t) +
           cplx(0.0, 1.0) * apply_symbol(linear_kg_solution(u0, u1, t),
                                         [](double xi) { return cplx(Lambda(xi), 0.0); });
}

}  // namespace

TEST_CASE("nonlinearity specs validate quadratic vanishing") {
    auto ok = NonlinearitySpec::custom([](double u, double ut, double) { return u * ut; });
    CHECK(ok.tag == "custom");
    CHECK_THROWS_AS(NonlinearitySpec::custom([](double, double, double) { return 1.0; }),
                    std::invalid_argument);
    CHECK_THROWS_AS(NonlinearitySpec::custom([](double u, double, double) { return u; }),
                    std::invalid_argument);
    CHECK(NonlinearitySpec::none().is_zero());
}

TEST_CASE("rhs: zero input, substitution identity") {
    Grid g = make_grid(128, 24.0);
    Field zero(g);
    CHECK(norm_linf(rhs(zero, 0.0, NonlinearitySpec::u_squared())) < 1e-14);

    // U = i Lambda u0 encodes (u, dt u) = (u0, 0); F = u^2 gives rhs = i Lambda U + u0^2
    Field u0 = sample_real(g, [](double x) { return 0.3 * std::exp(-x * x); });
    Field U = half_kg_data(u0, Field(g));
    Field r = rhs(U, 0.0, NonlinearitySpec::u_squared());
    Field expect = cplx(0.0, 1.0) * apply_symbol(U, [](double xi) { return cplx(Lambda(xi), 0.0); });
    for (std::size_t p = 0; p < g.n(); ++p)
        expect.v[p] += u0.v[p].real() * u0.v[p].real();
    CHECK(oracle::max_abs_diff(r, expect) < 1e-11);
}

TEST_CASE("free flow: trajectory matches the closed-form linear solution") {
    Grid g = make_grid(1024, 64.0 * M_PI);
    Field u0 = sample_real(g, [](double x) { return std::exp(-x * x); });
    Field u1 = sample_real(g, [](double x) { return -2.0 * x * std::exp(-x * x); });
    Field U0 = half_kg_data(u0, u1);

    IntegrateOptions opts;
    opts.snapshot_stride = 100;
    opts.store_fields = true;
    Trajectory traj = integrate(U0, NonlinearitySpec::none(), 10.0, 0.01, 100.0, opts);
    REQUIRE(traj.status == RunStatus::completed);

    Field U_expect = half_kg_from_linear(g, u0, u1, 10.0);
    const Field& U_final = traj.states.back();
    CHECK(traj.times.back() == doctest::Approx(10.0));
    CHECK(oracle::max_abs_diff(U_final, U_expect) < 1e-7);

    // exact unitarity and H^N conservation of the discrete free flow
    CHECK(norm_l2(U_final) == doctest::Approx(norm_l2(U0)).epsilon(1e-12));
    CHECK(sobolev_norm(U_final, 4) == doctest::Approx(sobolev_norm(U0, 4)).epsilon(1e-12));
}

TEST_CASE("integrate: zero data completes with an identically zero trajectory") {
    Grid g = make_grid(64, 16.0);
    Trajectory traj = integrate(Field(g), NonlinearitySpec::u_squared(), 1.0, 0.05, 1.0);
    CHECK(traj.status == RunStatus::completed);
    for (const auto& s : traj.states) CHECK(norm_linf(s) == 0.0);
    for (const auto& ns : traj.norms) CHECK(ns.hN == 0.0);
}

TEST_CASE("single mode over one period matches the linear closed form") {
    Grid g = make_grid(64, 2.0 * M_PI);
    Field u0 = sample_real(g, [](double x) { return std::cos(x); });
    Field U0 = half_kg_data(u0, Field(g));
    const double period = 2.0 * M_PI / std::sqrt(2.0);
    IntegrateOptions opts;
    opts.snapshot_stride = 1;
    opts.store_fields = true;
    Trajectory traj = integrate(U0, NonlinearitySpec::none(), period, period / 256.0, 10.0, opts);
    REQUIRE(traj.status == RunStatus::completed);
    Field expect = half_kg_from_linear(g, u0, Field(g), traj.t_end);
    CHECK(oracle::max_abs_diff(traj.states.back(), expect) < 1e-8);
}

TEST_CASE("fourth-order self-convergence of the nonlinear stepper") {
    // cutoff at |xi| ~ 42: even the iterated quartic spectrum of the packet
    // dies long before it, so per-step truncation cannot floor the
    // measurement; amplitude 2 keeps the dt^4 error far above roundoff
    Grid g = make_grid(1024, 16.0 * M_PI);
    Field u0 = cplx(2.0, 0.0) * sample_real(g, [](double x) { return std::exp(-x * x); });
    Field u1 = cplx(2.0, 0.0) * sample_real(g, [](double x) { return -2.0 * x * std::exp(-x * x); });
    Field U0 = half_kg_data(u0, u1);
    auto F = NonlinearitySpec::u_squared();
    const double t_end = 3.0;

    auto final_state = [&](double dt) {
        IntegrateOptions opts;
        opts.snapshot_stride = 1000000;  // endpoints only
        opts.store_fields = true;
        Trajectory tr = integrate(U0, F, t_end, dt, 1000.0, opts);
        REQUIRE(tr.status == RunStatus::completed);
        return tr.states.back();
    };

    Field ref = final_state(2.5e-4);
    const double e1 = oracle::max_abs_diff(final_state(4e-3), ref);
    MESSAGE("e(4e-3) = ", e1);
    const double e2 = oracle::max_abs_diff(final_state(2e-3), ref);
    const double e3 = oracle::max_abs_diff(final_state(1e-3), ref);
    const double order12 = std::log2(e1 / e2);
    const double order23 = std::log2(e2 / e3);
    MESSAGE("self-convergence orders: ", order12, ", ", order23);
    CHECK(order12 >= 3.2);
    CHECK(order23 >= 3.2);
}

TEST_CASE("real data stays real along the nonlinear flow") {
    Grid g = make_grid(512, 32.0 * M_PI);
    Field U0 = gaussian_data_U0(g, 0.2);
    IntegrateOptions opts;
    opts.snapshot_stride = 100;
    opts.store_fields = true;
    Trajectory traj = integrate(U0, NonlinearitySpec::u_squared(), 5.0, 0.01, 100.0, opts);
    REQUIRE(traj.status == RunStatus::completed);
    for (const auto& s : traj.states) {
        Field u = apply_symbol(imag_part(s), [](double xi) { return cplx(1.0 / Lambda(xi), 0.0); });
        double resid = 0.0;
        for (std::size_t p = 0; p < g.n(); ++p) resid = std::max(resid, std::abs(u.v[p].imag()));
        CHECK(resid < 1e-10);
    }
}

TEST_CASE("profile is conserved by the free flow and t=0 profile equals the data") {
    Grid g = make_grid(512, 32.0 * M_PI);
    Field U0 = gaussian_data_U0(g, 0.3);
    IntegrateOptions opts;
    opts.snapshot_stride = 50;
    opts.store_fields = true;
    Trajectory traj = integrate(U0, NonlinearitySpec::none(), 8.0, 0.02, 100.0, opts);
    REQUIRE(traj.status == RunStatus::completed);

    Field V0 = profile_of(traj, 0.0);
    CHECK(oracle::max_abs_diff(V0, U0) < 1e-12);
    for (double t : {2.0, 5.0, 8.0}) {
        Field V = profile_of(traj, t);
        CHECK(oracle::max_abs_diff(V, U0) < 1e-10);
    }
    CHECK_THROWS_AS(profile_of(traj, 3.1415), std::invalid_argument);
}

TEST_CASE("profile time derivative matches e^{-itL} N(U) to O(dt^2)") {
    Grid g = make_grid(512, 32.0 * M_PI);
    Field U0 = gaussian_data_U0(g, 0.2);
    auto F = NonlinearitySpec::u_squared();
    const double dt = 5e-3;
    IntegrateOptions opts;
    opts.snapshot_stride = 1;
    opts.store_fields = true;
    Trajectory traj = integrate(U0, F, 0.5, dt, 100.0, opts);
    REQUIRE(traj.status == RunStatus::completed);

    const std::size_t i = traj.index_of(0.25);
    Field Vp = profile_of(traj, traj.times[i + 1]);
    Field Vm = profile_of(traj, traj.times[i - 1]);
    Field dV = cplx(1.0 / (2.0 * dt), 0.0) * (Vp - Vm);

    const Field& U = traj.states[i];
    Field NU = rhs(U, traj.times[i], F) -
               cplx(0.0, 1.0) * apply_symbol(U, [](double xi) { return cplx(Lambda(xi), 0.0); });
    Field expect = propagate(NU, traj.times[i], -1);
    const double scale = std::max(1.0, norm_linf(expect));
    CHECK(oracle::max_abs_diff(dV, expect) < 50.0 * dt * dt * scale);
}

TEST_CASE("duhamel residual: free flow exact, quadratic flow scales as dt^2") {
    Grid g = make_grid(512, 32.0 * M_PI);
    Field U0 = gaussian_data_U0(g, 0.1);

    IntegrateOptions opts;
    opts.snapshot_stride = 1;
    opts.store_fields = true;

    auto Fz = NonlinearitySpec::none();
    Trajectory lin = integrate(U0, Fz, 2.0, 0.01, 100.0, opts);
    CHECK(duhamel_residual(lin, 2.0, Fz) < 1e-10);

    auto F = NonlinearitySpec::u_squared();
    Trajectory t1 = integrate(U0, F, 2.0, 4e-3, 100.0, opts);
    Trajectory t2 = integrate(U0, F, 2.0, 2e-3, 100.0, opts);
    const double r1 = duhamel_residual(t1, 2.0, F);
    const double r2 = duhamel_residual(t2, 2.0, F);
    MESSAGE("duhamel residuals: ", r1, " -> ", r2, " ratio ", r1 / r2);
    CHECK(r1 / r2 > 3.0);  // ~x4 per dt halving
    CHECK(r1 / r2 < 5.5);
    CHECK(r1 < 1e-4 * norm_l2(U0));

    Trajectory tiny = integrate(U0, F, 0.01, 0.01, 100.0, opts);
    CHECK_THROWS_AS(duhamel_residual(tiny, 0.0, F), std::invalid_argument);
}

TEST_CASE("energy audit: free flow needs no constant, nonlinear constant is dt-stable") {
    Grid g = make_grid(512, 32.0 * M_PI);
    Field U0 = gaussian_data_U0(g, 0.1);
    IntegrateOptions opts;
    opts.snapshot_stride = 10;
    opts.store_fields = false;
    opts.norm_N = 6;

    Trajectory lin = integrate(U0, NonlinearitySpec::none(), 5.0, 0.01, 100.0, opts);
    auto lin_rep = energy_audit(lin, 6);
    CHECK(lin_rep.c_fit <= 1e-9);

    auto F = NonlinearitySpec::u_squared();
    Trajectory a = integrate(U0, F, 5.0, 0.01, 100.0, opts);
    Trajectory b = integrate(U0, F, 5.0, 0.005, 100.0, opts);
    auto ra = energy_audit(a, 6);
    auto rb = energy_audit(b, 6);
    MESSAGE("energy audit constants: ", ra.c_fit, " vs ", rb.c_fit);
    CHECK(ra.c_fit > 0.0);
    CHECK(std::abs(ra.c_fit - rb.c_fit) <= 0.2 * std::max(ra.c_fit, rb.c_fit));
    for (double m : ra.margins) CHECK(m <= 1e-12);

    Trajectory degenerate = integrate(U0, F, 0.01, 0.01, 100.0, opts);
    CHECK_THROWS_AS(energy_audit(degenerate, 6), std::invalid_argument);
}

TEST_CASE("energy audit constant is stable across epsilon in the norm-small regime") {
    // The inequality presumes ||U||_{H^N} small; on this box that means data
    // amplitudes well below 1e-3 (a constant of modest height already has
    // L^2 norm sqrt(L) ~ 10).  In that regime the fitted constant is close to
    // data-independent; at amplitudes where ||U||_{H^N} >> 1 it is not, and
    // the audit is not meaningful there.
    Grid g = make_grid(512, 32.0 * M_PI);
    IntegrateOptions opts;
    opts.snapshot_stride = 10;
    opts.norm_N = 6;
    opts.store_fields = false;
    auto F = NonlinearitySpec::u_squared();
    std::vector<double> cs;
    for (double eps : {5e-4, 1e-3, 2e-3}) {
        Trajectory tr = integrate(gaussian_data_U0(g, eps), F, 5.0, 0.01, 100.0, opts);
        cs.push_back(energy_audit(tr, 6).c_fit);
    }
    MESSAGE("c_fit across eps: ", cs[0], ", ", cs[1], ", ", cs[2]);
    const double mx = std::max({cs[0], cs[1], cs[2]});
    const double mn = std::min({cs[0], cs[1], cs[2]});
    CHECK(mx / mn < 2.5);
}

TEST_CASE("blow-up detection: threshold crossing is a status, never a throw") {
    Grid g = make_grid(512, 64.0 * M_PI);
    Field U0 = gaussian_data_U0(g, 0.9);
    IntegrateOptions opts;
    opts.snapshot_stride = 50;
    opts.store_fields = false;
    opts.aliasing_tol = 1e-3;
    opts.secondary_threshold = 1.3;
    auto F = NonlinearitySpec::dtu_sq_dxu();
    const double threshold = 2.0;  // low threshold keeps the test fast
    Trajectory traj = integrate(U0, F, 500.0, 0.05, threshold, opts);
    CHECK(traj.status == RunStatus::blow_up);
    CHECK(traj.t_blowup > 0.0);
    CHECK(traj.t_secondary >= 0.0);
    CHECK(traj.t_secondary <= traj.t_blowup);
}

TEST_CASE("aliasing abort fires on data with tail energy above tolerance") {
    Grid g = make_grid(64, 16.0);
    std::vector<cplx> fhat(g.n(), cplx(0.0, 0.0));
    for (std::size_t s = 0; s < g.n(); ++s)
        if (std::labs(g.mode(s)) > 21) fhat[s] = cplx(1.0, 0.0);
    Field U0 = inverse(g, fhat);
    Trajectory traj = integrate(U0, NonlinearitySpec::u_squared(), 1.0, 0.01, 1e6);
    CHECK(traj.status == RunStatus::aliasing_abort);
    CHECK(traj.max_tail_fraction > 1e-6);
}

TEST_CASE("integrate validates arguments") {
    Grid g = make_grid(64, 16.0);
    CHECK_THROWS_AS(integrate(Field(g), NonlinearitySpec::none(), 1.0, 0.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate(Field(g), NonlinearitySpec::none(), 1.0, 0.1, -1.0),
                    std::invalid_argument);
}
