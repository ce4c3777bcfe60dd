#include "kg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace kg {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// One FFTW plan pair per transform size.  Plans are created with
// FFTW_UNALIGNED so they can execute on any caller buffer; creation is
// serialized (the FFTW planner is not thread-safe), execution is not.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(std::size_t n) {
    static std::mutex mtx;
    static std::map<std::size_t, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> a(n), b(n);
    PlanPair p;
    p.fwd = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

void run_dft(fftw_plan plan, const std::vector<cplx>& in, std::vector<cplx>& out) {
    out.resize(in.size());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

Grid::Grid(std::size_t n, double box_length) {
    auto d = std::make_shared<Data>();
    d->n = n;
    d->box_length = box_length;
    d->dx = box_length / static_cast<double>(n);
    d->dxi = 2.0 * M_PI / box_length;
    d->freq.resize(n);
    long half = static_cast<long>(n) / 2;
    for (long m = -half; m < half; ++m)
        d->freq[static_cast<std::size_t>(m + half)] = d->dxi * static_cast<double>(m);
    data_ = std::move(d);
}

Grid make_grid(std::size_t n, double box_length) {
    if (!is_power_of_two(n) || n < 8)
        throw std::invalid_argument("make_grid: n must be a power of two with n >= 8, got " + std::to_string(n));
    if (!(box_length > 0.0) || !std::isfinite(box_length))
        throw std::invalid_argument("make_grid: box_length must be positive and finite");
    return Grid(n, box_length);
}

Field::Field(const Grid& g, std::vector<cplx> values) : grid(g), v(std::move(values)) {
    if (v.size() != g.n()) throw std::invalid_argument("Field: values length must equal grid.n");
}

Field& Field::operator+=(const Field& other) {
    if (!grid.same_as(other.grid)) throw std::invalid_argument("Field: grid mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.v[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    if (!grid.same_as(other.grid)) throw std::invalid_argument("Field: grid mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= other.v[i];
    return *this;
}

Field& Field::operator*=(cplx a) {
    for (auto& z : v) z *= a;
    return *this;
}

Field operator+(Field a, const Field& b) { a += b; return a; }
Field operator-(Field a, const Field& b) { a -= b; return a; }
Field operator*(cplx a, Field f) { f *= a; return f; }

Field conj(const Field& f) {
    Field out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out.v[i] = std::conj(f.v[i]);
    return out;
}

Field real_part(const Field& f) {
    Field out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out.v[i] = f.v[i].real();
    return out;
}

Field imag_part(const Field& f) {
    Field out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out.v[i] = f.v[i].imag();
    return out;
}

Field sample(const Grid& g, const std::function<cplx(double)>& fn) {
    Field out(g);
    for (std::size_t p = 0; p < g.n(); ++p) out.v[p] = fn(g.x(p));
    return out;
}

Field sample_real(const Grid& g, const std::function<double(double)>& fn) {
    Field out(g);
    for (std::size_t p = 0; p < g.n(); ++p) out.v[p] = fn(g.x(p));
    return out;
}

double norm_l2(const Field& f) {
    double s = 0.0;
    for (const auto& z : f.v) s += std::norm(z);
    return std::sqrt(f.grid.dx() * s);
}

double norm_l1(const Field& f) {
    double s = 0.0;
    for (const auto& z : f.v) s += std::abs(z);
    return f.grid.dx() * s;
}

double norm_linf(const Field& f) {
    double s = 0.0;
    for (const auto& z : f.v) s = std::max(s, std::abs(z));
    return s;
}

bool all_finite(const Field& f) {
    for (const auto& z : f.v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

std::vector<cplx> forward(const Field& f) {
    const std::size_t n = f.grid.n();
    std::vector<cplx> out;
    run_dft(plans_for(n).fwd, f.v, out);
    // Fold in the x-origin shift (-1)^m and the dx quadrature weight so the
    // result is fhat(xi_m) under the documented convention.
    const double dx = f.grid.dx();
    for (std::size_t s = 0; s < n; ++s) out[s] *= (s % 2 == 0) ? dx : -dx;
    return out;
}

Field inverse(const Grid& g, const std::vector<cplx>& fhat) {
    const std::size_t n = g.n();
    if (fhat.size() != n) throw std::invalid_argument("inverse: spectrum length must equal grid.n");
    std::vector<cplx> tmp(n);
    const double invL = 1.0 / g.box_length();
    for (std::size_t s = 0; s < n; ++s) tmp[s] = (s % 2 == 0) ? invL * fhat[s] : -invL * fhat[s];
    std::vector<cplx> out;
    run_dft(plans_for(n).bwd, tmp, out);
    return Field(g, std::move(out));
}

Field apply_symbol(const Field& f, const UnarySymbol& sigma) {
    auto fhat = forward(f);
    const std::size_t n = f.grid.n();
    for (std::size_t s = 0; s < n; ++s) {
        const double xi = f.grid.xi(s);
        const cplx w = sigma(xi);
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
            std::ostringstream msg;
            msg << "apply_symbol: symbol is non-finite at xi = " << xi;
            throw std::invalid_argument(msg.str());
        }
        fhat[s] *= w;
    }
    return inverse(f.grid, fhat);
}

Field propagate(const Field& f, double t, int sign) {
    if (!std::isfinite(t)) throw std::invalid_argument("propagate: t must be finite");
    const double st = (sign >= 0 ? 1.0 : -1.0) * t;
    return apply_symbol(f, [st](double xi) {
        const double phase = st * Lambda(xi);
        return cplx(std::cos(phase), std::sin(phase));
    });
}

Field linear_kg_solution(const Field& u0, const Field& u1, double t) {
    if (!u0.grid.same_as(u1.grid)) throw std::invalid_argument("linear_kg_solution: grid mismatch");
    Field a = apply_symbol(u0, [t](double xi) { return cplx(std::cos(t * Lambda(xi)), 0.0); });
    Field b = apply_symbol(u1, [t](double xi) {
        const double lam = Lambda(xi);
        return cplx(std::sin(t * lam) / lam, 0.0);
    });
    return a + b;
}

Field linear_kg_velocity(const Field& u0, const Field& u1, double t) {
    if (!u0.grid.same_as(u1.grid)) throw std::invalid_argument("linear_kg_velocity: grid mismatch");
    Field a = apply_symbol(u0, [t](double xi) {
        const double lam = Lambda(xi);
        return cplx(-lam * std::sin(t * lam), 0.0);
    });
    Field b = apply_symbol(u1, [t](double xi) { return cplx(std::cos(t * Lambda(xi)), 0.0); });
    return a + b;
}

Field pad_field(const Field& f, std::size_t factor) {
    const std::size_t n = f.grid.n();
    const std::size_t nf = n * factor;
    Grid fine(nf, f.grid.box_length());
    auto fhat = forward(f);
    std::vector<cplx> padded(nf, cplx(0.0, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        long m = f.grid.mode(s);
        std::size_t sf = static_cast<std::size_t>((m + static_cast<long>(nf)) % static_cast<long>(nf));
        padded[sf] = fhat[s];
    }
    return inverse(fine, padded);
}

Field truncate_field(const Field& f_fine, const Grid& coarse) {
    const std::size_t nf = f_fine.grid.n();
    const std::size_t n = coarse.n();
    auto fhat = forward(f_fine);
    std::vector<cplx> cut(n, cplx(0.0, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        long m = coarse.mode(s);
        std::size_t sf = static_cast<std::size_t>((m + static_cast<long>(nf)) % static_cast<long>(nf));
        cut[s] = fhat[sf];
    }
    return inverse(coarse, cut);
}

double dealias_tail_fraction(const std::vector<cplx>& fhat) {
    const std::size_t n = fhat.size();
    const long keep = static_cast<long>(n) / 3;
    double total = 0.0, tail = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        long m = s < n / 2 ? static_cast<long>(s) : static_cast<long>(s) - static_cast<long>(n);
        const double e = std::norm(fhat[s]);
        total += e;
        if (std::labs(m) > keep) tail += e;
    }
    return total > 0.0 ? tail / total : 0.0;
}

void dealias_truncate(std::vector<cplx>& fhat) {
    const std::size_t n = fhat.size();
    const long keep = static_cast<long>(n) / 3;
    for (std::size_t s = 0; s < n; ++s) {
        long m = s < n / 2 ? static_cast<long>(s) : static_cast<long>(s) - static_cast<long>(n);
        if (std::labs(m) > keep) fhat[s] = cplx(0.0, 0.0);
    }
}

double nyquist_amplitude(const Field& f) {
    auto fhat = forward(f);
    double peak = 0.0;
    for (const auto& z : fhat) peak = std::max(peak, std::abs(z));
    if (peak == 0.0) return 0.0;
    return std::abs(fhat[f.grid.n() / 2]) / peak;
}

}  // namespace kg
