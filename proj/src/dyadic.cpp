#include "kg/dyadic.hpp"

#include <cmath>
#include <stdexcept>

namespace kg {

namespace {

// g(s) = exp(-1/s) for s > 0, else 0.
double bump_g(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

constexpr double kPsiOne = 1.25;   // 5/4
constexpr double kPsiZero = 1.6;   // 8/5

double pow2(int k) { return std::ldexp(1.0, k); }

}  // namespace

double psi(double x) {
    const double a = std::abs(x);
    if (a <= kPsiOne) return 1.0;
    if (a >= kPsiZero) return 0.0;
    const double up = bump_g(kPsiZero - a);
    const double down = bump_g(a - kPsiOne);
    return up / (up + down);
}

double psi_k(int k, double x) {
    if (k < -1) throw std::invalid_argument("psi_k: k must be >= -1");
    if (k == -1) return psi(2.0 * std::abs(x));
    const double a = std::abs(x);
    return psi(a / pow2(k)) - psi(a / pow2(k - 1));
}

double psi_interval(int lo, int hi, double x) {
    double s = 0.0;
    for (int k = std::max(lo, -1); k <= hi; ++k) s += psi_k(k, x);
    return s;
}

int default_j_max(const Grid& g) {
    return static_cast<int>(std::ceil(std::log2(g.box_length())));
}

int default_k_max(const Grid& g) {
    return static_cast<int>(std::ceil(std::log2(g.xi_max())));
}

Field project_freq(const Field& f, int k) {
    if (k < -1) throw std::invalid_argument("project_freq: k must be >= -1");
    return apply_symbol(f, [k](double xi) { return cplx(psi_k(k, xi), 0.0); });
}

Field project_interval(const Field& f, int lo, int hi) {
    return apply_symbol(f, [lo, hi](double xi) { return cplx(psi_interval(lo, hi, xi), 0.0); });
}

Field localize_phys(const Field& f, int j) {
    if (j < -1) throw std::invalid_argument("localize_phys: j must be >= -1");
    Field out(f.grid);
    for (std::size_t p = 0; p < f.size(); ++p) out.v[p] = psi_k(j, f.grid.x(p)) * f.v[p];
    return out;
}

bool interaction_set_x(int k, int k1, int k2) {
    if (k1 < -1 || k2 < -1) return false;
    const int mx = std::max(k1, k2);
    if (std::abs(mx - k) <= 8) return true;                       // X_k^1
    return mx >= k + 8 && std::abs(k1 - k2) <= 8;                 // X_k^2
}

bool interaction_set_y(int k, int k1, int k2, int k3) {
    if (k1 < -1 || k2 < -1 || k3 < -1) return false;
    const int mx = std::max({k1, k2, k3});
    const int med = k1 + k2 + k3 - mx - std::min({k1, k2, k3});
    if (std::abs(mx - k) <= 4) return true;                       // Y_k^1
    return k + 4 <= mx && mx <= med + 4;                          // Y_k^2
}

DyadicDecomposition::DyadicDecomposition(const Field& f, int j_max, int k_max)
    : j_max_(j_max), k_max_(k_max) {
    if (j_max < -1 || k_max < -1)
        throw std::invalid_argument("DyadicDecomposition: truncation bounds must be >= -1");
    parts_.reserve(static_cast<std::size_t>(j_max + 2) * static_cast<std::size_t>(k_max + 2));
    for (int k = -1; k <= k_max; ++k) {
        Field pk = project_freq(f, k);
        for (int j = -1; j <= j_max; ++j) parts_.push_back(localize_phys(pk, j));
    }
}

std::size_t DyadicDecomposition::index(int j, int k) const {
    if (j < -1 || j > j_max_ || k < -1 || k > k_max_)
        throw std::out_of_range("DyadicDecomposition: (j,k) outside truncation bounds");
    return static_cast<std::size_t>(k + 1) * static_cast<std::size_t>(j_max_ + 2) +
           static_cast<std::size_t>(j + 1);
}

const Field& DyadicDecomposition::component(int j, int k) const { return parts_[index(j, k)]; }

Field DyadicDecomposition::sum_over_j(int k) const {
    Field acc = component(-1, k);
    for (int j = 0; j <= j_max_; ++j) acc += component(j, k);
    return acc;
}

Field DyadicDecomposition::total() const {
    Field acc = sum_over_j(-1);
    for (int k = 0; k <= k_max_; ++k) acc += sum_over_j(k);
    return acc;
}

double bernstein_ratio(const Field& f, int k) {
    Field pk = project_freq(f, k);
    const double l2 = norm_l2(pk);
    if (l2 == 0.0) return 0.0;
    return norm_linf(pk) / (std::exp2(0.5 * k) * l2);
}

}  // namespace kg
