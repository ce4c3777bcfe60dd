#include <random>

#include "doctest.h"
#include "kg/spectral.hpp"
#include "oracles.hpp"

using namespace kg;

TEST_CASE("make_grid populates the lattice and rejects bad input") {
    Grid g = make_grid(8, 2.0 * M_PI);
    const auto& freq = g.frequencies();
    REQUIRE(freq.size() == 8);
    for (int m = -4; m < 4; ++m) CHECK(freq[static_cast<std::size_t>(m + 4)] == doctest::Approx(m).epsilon(1e-15));
    CHECK(g.dx() * static_cast<double>(g.n()) == doctest::Approx(g.box_length()).epsilon(1e-15));
    for (std::size_t i = 1; i < freq.size(); ++i) CHECK(freq[i] > freq[i - 1]);
    // symmetric about 0 except the unpaired Nyquist mode freq[0]
    for (std::size_t i = 1; i < freq.size(); ++i)
        CHECK(freq[i] == doctest::Approx(-freq[freq.size() - i]).epsilon(1e-15));

    Grid g2 = make_grid(1024, 256.0 * M_PI);
    CHECK(g2.dx() == doctest::Approx(M_PI / 4.0).epsilon(1e-15));

    CHECK_THROWS_AS(make_grid(9, 2.0 * M_PI), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 2.0 * M_PI), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(64, -1.0), std::invalid_argument);
}

TEST_CASE("forward transform matches the direct Fourier sum") {
    Grid g = make_grid(32, 5.0);
    std::mt19937_64 rng(7);
    Field f = oracle::random_schwartz_field(g, rng, 1.5);
    auto fast = forward(f);
    auto slow = oracle::dft(f);
    for (std::size_t s = 0; s < g.n(); ++s) CHECK(std::abs(fast[s] - slow[s]) < 1e-12);
}

TEST_CASE("round trip and Plancherel") {
    Grid g = make_grid(128, 40.0);
    std::mt19937_64 rng(11);
    Field f = oracle::random_schwartz_field(g, rng, 8.0);
    Field back = inverse(g, forward(f));
    CHECK(oracle::max_abs_diff(f, back) < 1e-12 * norm_linf(f));

    // dx sum |f|^2 == (1/L) sum |fhat|^2 under the fixed convention
    auto fhat = forward(f);
    double spec = 0.0;
    for (const auto& z : fhat) spec += std::norm(z);
    spec /= g.box_length();
    double phys = 0.0;
    for (const auto& z : f.v) phys += std::norm(z);
    phys *= g.dx();
    CHECK(spec == doctest::Approx(phys).epsilon(1e-10));
}

TEST_CASE("apply_symbol: zero mode, single mode, linearity, error path") {
    Grid g = make_grid(64, 2.0 * M_PI);
    auto lam = [](double xi) { return cplx(Lambda(xi), 0.0); };

    Field ones = sample_real(g, [](double) { return 1.0; });
    Field r = apply_symbol(ones, lam);
    CHECK(oracle::max_abs_diff(r, ones) < 1e-13);  // Lambda(0) = 1

    Field cosx = sample_real(g, [](double x) { return std::cos(x); });
    Field rc = apply_symbol(cosx, lam);
    Field expect = cplx(std::sqrt(2.0), 0.0) * cosx;  // Lambda(+-1) = sqrt(2)
    CHECK(oracle::max_abs_diff(rc, expect) < 1e-12);

    std::mt19937_64 rng(3);
    Field a = oracle::random_schwartz_field(g, rng, 1.0);
    Field b = oracle::random_schwartz_field(g, rng, 1.0);
    Field lhs = apply_symbol(cplx(2.0, 1.0) * a + cplx(0.0, -3.0) * b, lam);
    Field rhs = cplx(2.0, 1.0) * apply_symbol(a, lam) + cplx(0.0, -3.0) * apply_symbol(b, lam);
    CHECK(oracle::max_abs_diff(lhs, rhs) < 1e-12);

    CHECK_THROWS_WITH_AS(apply_symbol(ones, [](double xi) { return cplx(1.0 / xi, 0.0); }),
                         doctest::Contains("non-finite"), std::invalid_argument);
}

TEST_CASE("apply_symbol Lambda on a Gaussian matches fine-grid quadrature of the inverse transform") {
    // Oracle: Lambda f(x) = (2 pi)^{-1} int Lambda(xi) fhat(xi) e^{i x xi} dxi with
    // fhat(xi) = sqrt(pi) e^{-xi^2/4} (exact transform of e^{-x^2}), quadrature at
    // 4x the grid resolution and 4x the frequency extent.
    Grid g = make_grid(256, 16.0 * M_PI);
    Field f = sample_real(g, [](double x) { return std::exp(-x * x); });
    Field lf = apply_symbol(f, [](double xi) { return cplx(Lambda(xi), 0.0); });

    const double xi_hi = 4.0 * g.xi_max();
    const std::size_t quad_n = 4 * g.n() * 4;
    const double dxi = 2.0 * xi_hi / static_cast<double>(quad_n);
    for (std::size_t p = 0; p < g.n(); p += 17) {
        const double x = g.x(p);
        double acc = 0.0;
        for (std::size_t q = 0; q < quad_n; ++q) {
            const double xi = -xi_hi + (static_cast<double>(q) + 0.5) * dxi;
            acc += Lambda(xi) * std::sqrt(M_PI) * std::exp(-xi * xi / 4.0) * std::cos(x * xi);
        }
        acc *= dxi / (2.0 * M_PI);
        CHECK(std::abs(lf.v[p].real() - acc) < 1e-8);
        CHECK(std::abs(lf.v[p].imag()) < 1e-12);
    }
}

TEST_CASE("propagate: identity at t=0, eigenmode phase, unitarity, group property, conjugation") {
    Grid g = make_grid(128, 16.0 * M_PI);
    std::mt19937_64 rng(5);
    Field f = oracle::random_schwartz_field(g, rng, 6.0);

    CHECK(oracle::max_abs_diff(propagate(f, 0.0, +1), f) < 1e-13);

    const double xi0 = 8.0 * 2.0 * M_PI / g.box_length();
    Field mode = sample(g, [xi0](double x) { return cplx(std::cos(xi0 * x), std::sin(xi0 * x)); });
    const double t = 1.7;
    Field prop = propagate(mode, t, +1);
    const cplx expect_phase(std::cos(t * Lambda(xi0)), std::sin(t * Lambda(xi0)));
    Field expect = expect_phase * mode;
    CHECK(oracle::max_abs_diff(prop, expect) < 1e-12);

    CHECK(norm_l2(propagate(f, 3.3, +1)) == doctest::Approx(norm_l2(f)).epsilon(1e-12));

    Field two_step = propagate(propagate(f, 1.2, +1), 2.1, +1);
    Field one_step = propagate(f, 3.3, +1);
    CHECK(oracle::max_abs_diff(two_step, one_step) < 1e-10);

    Field lhs = propagate(conj(f), 2.5, -1);
    Field rhs = conj(propagate(f, 2.5, +1));
    CHECK(oracle::max_abs_diff(lhs, rhs) < 1e-12);

    Field round = propagate(propagate(f, 4.0, +1), 4.0, -1);
    CHECK(oracle::max_abs_diff(round, f) < 1e-10);
}

TEST_CASE("linear_kg_solution: data recovery and the single-mode closed form") {
    Grid g = make_grid(64, 2.0 * M_PI);
    Field u0 = sample_real(g, [](double x) { return std::cos(x); });
    Field zero(g);

    Field at0 = linear_kg_solution(u0, zero, 0.0);
    CHECK(oracle::max_abs_diff(at0, u0) < 1e-13);

    Field vel0 = linear_kg_velocity(zero, u0, 0.0);
    CHECK(oracle::max_abs_diff(vel0, u0) < 1e-13);
    CHECK(norm_linf(linear_kg_solution(zero, u0, 0.0)) < 1e-13);

    // cos x solves v'' + 2 v = 0 per mode: u(t) = cos(sqrt(2) t) cos(x)
    const double t = 2.9;
    Field sol = linear_kg_solution(u0, zero, t);
    Field expect = cplx(std::cos(std::sqrt(2.0) * t), 0.0) * u0;
    CHECK(oracle::max_abs_diff(sol, expect) < 1e-12);

    Grid other = make_grid(128, 2.0 * M_PI);
    CHECK_THROWS_AS(linear_kg_solution(u0, Field(other), 1.0), std::invalid_argument);
}

TEST_CASE("pad/truncate round trip and dealias bookkeeping") {
    Grid g = make_grid(64, 20.0);
    std::mt19937_64 rng(9);
    Field f = oracle::random_schwartz_field(g, rng, 4.0);
    Field fine = pad_field(f, 2);
    CHECK(fine.grid.n() == 128);
    Field back = truncate_field(fine, g);
    CHECK(oracle::max_abs_diff(back, f) < 1e-12);

    auto fhat = forward(f);
    std::vector<cplx> flat(g.n(), cplx(1.0, 0.0));
    const double frac = dealias_tail_fraction(flat);
    // modes with |m| > 21 out of 64: 64 - 43 = 21 slots
    CHECK(frac == doctest::Approx(21.0 / 64.0).epsilon(1e-12));
    dealias_truncate(flat);
    double tail_after = dealias_tail_fraction(flat);
    CHECK(tail_after == 0.0);
}

TEST_CASE("nyquist amplitude flags rough data") {
    Grid g = make_grid(64, 2.0 * M_PI);
    Field smooth = sample_real(g, [](double x) { return std::exp(std::cos(x)); });
    CHECK(nyquist_amplitude(smooth) < 1e-12);
    Field rough = sample_real(g, [](double x) { return std::cos(32.0 * x); });
    CHECK(nyquist_amplitude(rough) > 0.5);
}
