#include "kg/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kg {

namespace {

// phi_1..phi_3 of the exponential integrator at z; series expansion near 0,
// closed form elsewhere.  z is purely imaginary here (z = i h Lambda).
struct Phi123 {
    cplx p1, p2, p3;
};

Phi123 phi123(cplx z) {
    Phi123 out;
    if (std::abs(z) < 0.25) {
        cplx term(1.0, 0.0);
        cplx s1(0.0, 0.0), s2(0.0, 0.0), s3(0.0, 0.0);
        // phi_k(z) = sum_{j>=0} z^j / (j+k)!
        double fact = 1.0;  // j!
        for (int j = 0; j < 24; ++j) {
            if (j > 0) {
                fact *= j;
                term *= z / static_cast<double>(j);
            }
            s1 += term / static_cast<double>(j + 1);
            s2 += term / static_cast<double>((j + 1) * (j + 2));
            s3 += term / static_cast<double>((j + 1) * (j + 2) * (j + 3));
        }
        out.p1 = s1;
        out.p2 = s2;
        out.p3 = s3;
        return out;
    }
    const cplx ez = std::exp(z);
    out.p1 = (ez - 1.0) / z;
    out.p2 = (ez - 1.0 - z) / (z * z);
    out.p3 = (ez - 1.0 - z - 0.5 * z * z) / (z * z * z);
    return out;
}

std::size_t reflect(std::size_t s, std::size_t n) { return (n - s) % n; }

// Spectra of u, dt u, dx u reconstructed from the spectrum of U:
//   u  = Lambda^{-1} (U - conj U)/(2i),   dt u = (U + conj U)/2,   dx u = d_x u.
void reconstruct_hats(const Grid& g, const std::vector<cplx>& Uhat, std::vector<cplx>& u_hat,
                      std::vector<cplx>& ut_hat, std::vector<cplx>& ux_hat) {
    const std::size_t n = g.n();
    u_hat.resize(n);
    ut_hat.resize(n);
    ux_hat.resize(n);
    const cplx half_i(0.0, -0.5);  // 1/(2i)
    for (std::size_t s = 0; s < n; ++s) {
        const cplx refl = std::conj(Uhat[reflect(s, n)]);
        const double xi = g.xi(s);
        const cplx imU = half_i * (Uhat[s] - refl);
        u_hat[s] = imU / Lambda(xi);
        ut_hat[s] = 0.5 * (Uhat[s] + refl);
        ux_hat[s] = cplx(0.0, xi) * u_hat[s];
    }
}

std::vector<cplx> pad_spectrum(const Grid& g, const Grid& fine, const std::vector<cplx>& fhat) {
    const std::size_t n = g.n(), nf = fine.n();
    std::vector<cplx> out(nf, cplx(0.0, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        const long m = g.mode(s);
        out[static_cast<std::size_t>((m + static_cast<long>(nf)) % static_cast<long>(nf))] = fhat[s];
    }
    return out;
}

// N(U)^ : F evaluated pointwise on the doubled grid, transformed back and
// truncated to the working band.
std::vector<cplx> nonlinear_hat(const Grid& g, const Grid& fine, const std::vector<cplx>& Uhat,
                                const NonlinearitySpec& F) {
    std::vector<cplx> u_hat, ut_hat, ux_hat;
    reconstruct_hats(g, Uhat, u_hat, ut_hat, ux_hat);
    Field u = inverse(fine, pad_spectrum(g, fine, u_hat));
    Field ut = inverse(fine, pad_spectrum(g, fine, ut_hat));
    Field ux = inverse(fine, pad_spectrum(g, fine, ux_hat));
    Field Fv(fine);
    for (std::size_t p = 0; p < fine.n(); ++p)
        Fv.v[p] = F.eval(u.v[p].real(), ut.v[p].real(), ux.v[p].real());
    auto Fhat_fine = forward(Fv);
    const std::size_t n = g.n(), nf = fine.n();
    std::vector<cplx> out(n);
    for (std::size_t s = 0; s < n; ++s) {
        const long m = g.mode(s);
        out[s] = Fhat_fine[static_cast<std::size_t>((m + static_cast<long>(nf)) % static_cast<long>(nf))];
    }
    return out;
}

}  // namespace

NonlinearitySpec NonlinearitySpec::u_squared() {
    NonlinearitySpec spec;
    spec.tag = "u_squared";
    spec.eval = [](double u, double, double) { return u * u; };
    spec.tables = SymbolTables::for_u_squared();
    return spec;
}

NonlinearitySpec NonlinearitySpec::dtu_sq_dxu() {
    NonlinearitySpec spec;
    spec.tag = "dtu_sq_dxu";
    spec.eval = [](double, double ut, double ux) { return ut * ut * ux; };
    spec.tables = SymbolTables::for_dtu_sq_dxu();
    return spec;
}

NonlinearitySpec NonlinearitySpec::none() {
    NonlinearitySpec spec;
    spec.tag = "none";
    spec.eval = nullptr;
    return spec;
}

NonlinearitySpec NonlinearitySpec::custom(std::function<double(double, double, double)> f,
                                          SymbolTables tables) {
    if (!f) throw std::invalid_argument("NonlinearitySpec: evaluator required");
    const double f0 = f(0.0, 0.0, 0.0);
    if (std::abs(f0) > 1e-12)
        throw std::invalid_argument("NonlinearitySpec: F(0,0,0) must vanish");
    const double h = 1e-5;
    const double gu = (f(h, 0, 0) - f(-h, 0, 0)) / (2 * h);
    const double gt = (f(0, h, 0) - f(0, -h, 0)) / (2 * h);
    const double gx = (f(0, 0, h) - f(0, 0, -h)) / (2 * h);
    if (std::abs(gu) > 1e-6 || std::abs(gt) > 1e-6 || std::abs(gx) > 1e-6)
        throw std::invalid_argument("NonlinearitySpec: gradient of F at 0 must vanish (quadratic vanishing)");
    NonlinearitySpec spec;
    spec.tag = "custom";
    spec.eval = std::move(f);
    spec.tables = std::move(tables);
    return spec;
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::blow_up: return "blow_up";
        case RunStatus::aliasing_abort: return "aliasing_abort";
    }
    return "?";
}

std::size_t Trajectory::index_of(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
    throw std::invalid_argument("Trajectory: time " + std::to_string(t) + " is not on the snapshot lattice");
}

Field half_kg_data(const Field& u0, const Field& u1) {
    if (!u0.grid.same_as(u1.grid)) throw std::invalid_argument("half_kg_data: grid mismatch");
    Field lam_u0 = apply_symbol(u0, [](double xi) { return cplx(Lambda(xi), 0.0); });
    return u1 + cplx(0.0, 1.0) * lam_u0;
}

Field rhs(const Field& U, double /*t*/, const NonlinearitySpec& F) {
    auto Uhat = forward(U);
    std::vector<cplx> total(Uhat.size());
    for (std::size_t s = 0; s < Uhat.size(); ++s)
        total[s] = cplx(0.0, Lambda(U.grid.xi(s))) * Uhat[s];
    if (!F.is_zero()) {
        Grid fine(U.grid.n() * 2, U.grid.box_length());
        auto Nhat = nonlinear_hat(U.grid, fine, Uhat, F);
        for (std::size_t s = 0; s < total.size(); ++s) total[s] += Nhat[s];
    }
    return inverse(U.grid, total);
}

namespace {

struct NormContext {
    const IntegrateOptions* opts;
    int j_max, k_max;
};

NormSample sample_norms(const Grid& g, const std::vector<cplx>& Uhat, const Field& Uphys,
                        double t, double sup, const NormContext& ctx) {
    NormSample ns;
    ns.t = t;
    ns.sup_lambda_u_ut = sup;
    // H^N directly from the spectrum
    double acc = 0.0;
    for (std::size_t s = 0; s < Uhat.size(); ++s) {
        const double xi = g.xi(s);
        acc += std::pow(1.0 + xi * xi, ctx.opts->norm_N) * std::norm(Uhat[s]);
    }
    ns.hN = std::sqrt(acc / g.box_length());
    ns.w1inf = winf_norm(Uphys, 1);
    double psum = 0.0;
    for (int k = -1; k <= ctx.k_max; ++k)
        psum += std::exp2(7.25 * k) * norm_linf(project_freq(Uphys, k));
    ns.energy_rhs = psum * ns.w1inf * ns.hN;
    if (ctx.opts->with_znorm) {
        Field V = propagate(Uphys, t, -1);
        ns.z_alpha = znorm(V, ctx.opts->znorm_alpha, ctx.j_max, ctx.k_max).value;
    }
    return ns;
}

}  // namespace

Trajectory integrate(const Field& U0, const NonlinearitySpec& F, double t_end, double dt,
                     double blowup_threshold, const IntegrateOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
    if (!(blowup_threshold > 0.0)) throw std::invalid_argument("integrate: threshold must be positive");

    const Grid& g = U0.grid;
    const Grid fine(g.n() * 2, g.box_length());
    const std::size_t n = g.n();

    Trajectory traj;
    traj.grid = g;
    traj.dt = dt;
    traj.blowup_threshold = blowup_threshold;

    NormContext nctx{&opts, default_j_max(g), default_k_max(g)};

    // Exponential integrator tables for the fixed step.
    std::vector<cplx> E(n), E2(n), Q(n), f1(n), f2(n), f3(n);
    for (std::size_t s = 0; s < n; ++s) {
        const cplx z(0.0, dt * Lambda(g.xi(s)));
        E[s] = std::exp(z);
        E2[s] = std::exp(0.5 * z);
        Q[s] = 0.5 * dt * phi123(0.5 * z).p1;
        const auto phis = phi123(z);
        f1[s] = dt * (phis.p1 - 3.0 * phis.p2 + 4.0 * phis.p3);
        f2[s] = dt * 2.0 * (phis.p2 - 2.0 * phis.p3);
        f3[s] = dt * (-phis.p2 + 4.0 * phis.p3);
    }

    auto Uhat = forward(U0);
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(t_end / dt));

    std::vector<cplx> N1, Na, Nb, Nc, a(n), b(n), c(n);

    for (std::size_t step = 0;; ++step) {
        const double t = dt * static_cast<double>(step);

        // 2/3-rule dealiasing with the tail-energy guard.
        const double tail = dealias_tail_fraction(Uhat);
        traj.max_tail_fraction = std::max(traj.max_tail_fraction, tail);
        dealias_truncate(Uhat);
        if (tail > opts.aliasing_tol) {
            traj.status = RunStatus::aliasing_abort;
            traj.t_end = t;
            break;
        }

        Field Uphys = inverse(g, Uhat);
        double sup = 0.0;
        bool finite = true;
        for (const auto& z : Uphys.v) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) { finite = false; break; }
            sup = std::max(sup, std::max(std::abs(z.real()), std::abs(z.imag())));
        }
        if (!finite || sup >= blowup_threshold) {
            traj.status = RunStatus::blow_up;
            traj.t_blowup = t;
            traj.t_end = t;
            if (finite) {
                traj.times.push_back(t);
                if (opts.store_fields) traj.states.push_back(Uphys);
                traj.norms.push_back(sample_norms(g, Uhat, Uphys, t, sup, nctx));
            }
            break;
        }
        if (opts.secondary_threshold && traj.t_secondary < 0.0 && sup >= *opts.secondary_threshold)
            traj.t_secondary = t;

        if (step % opts.snapshot_stride == 0 || step == n_steps) {
            traj.times.push_back(t);
            if (opts.store_fields) traj.states.push_back(Uphys);
            traj.norms.push_back(sample_norms(g, Uhat, Uphys, t, sup, nctx));
        }
        if (step == n_steps) {
            traj.status = RunStatus::completed;
            traj.t_end = t;
            break;
        }

        if (F.is_zero()) {
            for (std::size_t s = 0; s < n; ++s) Uhat[s] *= E[s];
            continue;
        }

        N1 = nonlinear_hat(g, fine, Uhat, F);
        for (std::size_t s = 0; s < n; ++s) a[s] = E2[s] * Uhat[s] + Q[s] * N1[s];
        Na = nonlinear_hat(g, fine, a, F);
        for (std::size_t s = 0; s < n; ++s) b[s] = E2[s] * Uhat[s] + Q[s] * Na[s];
        Nb = nonlinear_hat(g, fine, b, F);
        for (std::size_t s = 0; s < n; ++s) c[s] = E2[s] * a[s] + Q[s] * (2.0 * Nb[s] - N1[s]);
        Nc = nonlinear_hat(g, fine, c, F);
        for (std::size_t s = 0; s < n; ++s)
            Uhat[s] = E[s] * Uhat[s] + f1[s] * N1[s] + f2[s] * (Na[s] + Nb[s]) + f3[s] * Nc[s];
    }

    return traj;
}

Field profile_of(const Trajectory& traj, double t) {
    const std::size_t i = traj.index_of(t);
    if (traj.states.empty())
        throw std::invalid_argument("profile_of: trajectory was run without stored fields");
    return propagate(traj.states[i], traj.times[i], -1);
}

double duhamel_residual(const Trajectory& traj, double t, const NonlinearitySpec& F) {
    const std::size_t end = traj.index_of(t);
    if (traj.states.empty())
        throw std::invalid_argument("duhamel_residual: trajectory was run without stored fields");
    if (end < 1) throw std::invalid_argument("duhamel_residual: too few snapshots for quadrature");

    const Grid& g = traj.grid;
    const Grid fine(g.n() * 2, g.box_length());
    const std::size_t n = g.n();

    // trapezoid of (e^{-is Lambda} N(U(s)))^ over the snapshot lattice
    std::vector<cplx> quad(n, cplx(0.0, 0.0));
    if (!F.is_zero()) {
        std::vector<cplx> prev(n), cur(n);
        for (std::size_t i = 0; i <= end; ++i) {
            auto Uhat = forward(traj.states[i]);
            auto Nhat = nonlinear_hat(g, fine, Uhat, F);
            const double s = traj.times[i];
            for (std::size_t q = 0; q < n; ++q) {
                const double ph = -s * Lambda(g.xi(q));
                cur[q] = cplx(std::cos(ph), std::sin(ph)) * Nhat[q];
            }
            if (i > 0) {
                const double h = traj.times[i] - traj.times[i - 1];
                for (std::size_t q = 0; q < n; ++q) quad[q] += 0.5 * h * (prev[q] + cur[q]);
            }
            std::swap(prev, cur);
        }
    }

    auto V0 = forward(propagate(traj.states[0], traj.times[0], -1));
    auto Vt = forward(propagate(traj.states[end], traj.times[end], -1));
    double acc = 0.0;
    for (std::size_t q = 0; q < n; ++q) acc += std::norm(Vt[q] - V0[q] - quad[q]);
    return std::sqrt(acc / g.box_length());
}

EnergyAuditReport energy_audit(const Trajectory& traj, int /*N*/) {
    if (traj.norms.size() < 3)
        throw std::invalid_argument("energy_audit: need at least 3 snapshots");
    EnergyAuditReport rep;
    // Integrated inequality: ||U(t)|| - ||U(0)|| <= C (||U(0)||^2 + ||U(0)||^3
    // + int_0^t rhs), one C for the boundary terms and the integral.  The
    // quadratic boundary terms absorb the oscillatory normal-form flux.
    const double h0 = traj.norms.front().hN;
    const double boundary = h0 * h0 + h0 * h0 * h0;
    std::vector<double> lhs, rhs_cum;
    double integral = 0.0;
    for (std::size_t i = 1; i < traj.norms.size(); ++i) {
        const auto& n0 = traj.norms[i - 1];
        const auto& n1 = traj.norms[i];
        integral += 0.5 * (n1.t - n0.t) * (n0.energy_rhs + n1.energy_rhs);
        lhs.push_back(n1.hN - h0);
        rhs_cum.push_back(boundary + integral);
    }
    for (std::size_t i = 0; i < lhs.size(); ++i)
        if (rhs_cum[i] > 0.0) rep.c_fit = std::max(rep.c_fit, lhs[i] / rhs_cum[i]);
    rep.c_fit = std::max(rep.c_fit, 0.0);
    for (std::size_t i = 0; i < lhs.size(); ++i)
        rep.margins.push_back(lhs[i] - rep.c_fit * rhs_cum[i]);
    return rep;
}

}  // namespace kg
