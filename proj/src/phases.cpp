#include "kg/phases.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace kg {

namespace {

double pow2(int k) { return std::ldexp(1.0, k); }

// Dyadic annulus of psi_k: [5/4 * 2^{k-1}, 8/5 * 2^k] for k >= 0, [0, 4/5] for k = -1.
std::pair<double, double> annulus(int k) {
    if (k == -1) return {0.0, 0.8};
    return {1.25 * pow2(k - 1), 1.6 * pow2(k)};
}

double bump_g(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

SignTuple SignTuple::of(int s1, int s2) {
    SignTuple t;
    t.s = {static_cast<int8_t>(s1 >= 0 ? 1 : -1), static_cast<int8_t>(s2 >= 0 ? 1 : -1), 1};
    t.arity = 2;
    return t;
}

SignTuple SignTuple::of(int s1, int s2, int s3) {
    SignTuple t;
    t.s = {static_cast<int8_t>(s1 >= 0 ? 1 : -1), static_cast<int8_t>(s2 >= 0 ? 1 : -1),
           static_cast<int8_t>(s3 >= 0 ? 1 : -1)};
    t.arity = 3;
    return t;
}

SignTuple SignTuple::parse(const std::string& text) {
    if (text.size() != 2 && text.size() != 3)
        throw std::invalid_argument("SignTuple: arity must be 2 or 3, got \"" + text + "\"");
    SignTuple t;
    t.arity = static_cast<int>(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '+') t.s[i] = 1;
        else if (text[i] == '-') t.s[i] = -1;
        else throw std::invalid_argument("SignTuple: expected '+' or '-', got \"" + text + "\"");
    }
    return t;
}

std::string SignTuple::str() const {
    std::string out;
    for (int i = 0; i < arity; ++i) out += (s[static_cast<std::size_t>(i)] > 0 ? '+' : '-');
    return out;
}

bool SignTuple::in_a_phi() const {
    if (arity != 3) return false;
    const std::string t = str();
    return t == "+++" || t == "++-" || t == "+--" || t == "---";
}

bool SignTuple::is_good() const {
    if (arity != 3) return false;
    const std::string t = str();
    return t == "+++" || t == "+--" || t == "---";
}

double phase2(double xi1, double xi2, const SignTuple& signs) {
    return -Lambda(xi1 + xi2) + signs[0] * Lambda(xi1) + signs[1] * Lambda(xi2);
}

double phase3(double xi1, double xi2, double xi3, const SignTuple& signs) {
    return -Lambda(xi1 + xi2 + xi3) + signs[0] * Lambda(xi1) + signs[1] * Lambda(xi2) +
           signs[2] * Lambda(xi3);
}

PhaseGradients phase_gradients(double xi, double eta, double zeta) {
    PhaseGradients g;
    g.d_xi = dLambda(xi - eta) - dLambda(xi);
    g.d_zeta = dLambda(zeta - eta) - dLambda(zeta);
    return g;
}

std::string PhaseAuditReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"bound\":\"" << bound_id << "\",\"samples\":" << samples
       << ",\"violations\":" << violations << ",\"fitted_constant\":" << fitted_constant
       << ",\"worst_point\":[" << worst_point[0] << "," << worst_point[1] << ","
       << worst_point[2] << "]}";
    return os.str();
}

PhaseAuditReport audit_phase_bounds(const std::string& which, std::size_t samples_per_cell,
                                    double range, std::uint64_t seed, int gap, int k3_max) {
    if (samples_per_cell == 0) throw std::invalid_argument("audit_phase_bounds: empty sample set");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-range, range);
    PhaseAuditReport rep;
    rep.bound_id = which;

    if (which == "bdd1") {
        const SignTuple pairs[4] = {SignTuple::of(1, 1), SignTuple::of(1, -1),
                                    SignTuple::of(-1, 1), SignTuple::of(-1, -1)};
        for (std::size_t i = 0; i < samples_per_cell; ++i) {
            const double xi1 = unif(rng), xi2 = unif(rng);
            for (const auto& sg : pairs) {
                const double ph = phase2(xi1, xi2, sg);
                const double denom = 1.0 + std::min({std::abs(xi1 + xi2), std::abs(xi1), std::abs(xi2)});
                ++rep.samples;
                if (ph == 0.0) { ++rep.violations; continue; }
                const double ratio = 1.0 / (std::abs(ph) * denom);
                if (ratio > rep.fitted_constant) {
                    rep.fitted_constant = ratio;
                    rep.worst_point = {xi1, xi2, 0.0};
                }
            }
        }
        return rep;
    }

    if (which == "3phase") {
        const SignTuple goods[3] = {SignTuple::parse("+++"), SignTuple::parse("+--"),
                                    SignTuple::parse("---")};
        for (std::size_t i = 0; i < samples_per_cell; ++i) {
            const double xi1 = unif(rng), xi2 = unif(rng), xi3 = unif(rng);
            for (const auto& sg : goods) {
                const double ph = phase3(xi1, xi2, xi3, sg);
                const double denom =
                    1.0 + std::min({std::abs(xi1 + xi2 + xi3), std::abs(xi1), std::abs(xi2), std::abs(xi3)});
                ++rep.samples;
                if (ph == 0.0) { ++rep.violations; rep.worst_point = {xi1, xi2, xi3}; continue; }
                const double ratio = 1.0 / (std::abs(ph) * denom);
                if (ratio > rep.fitted_constant) {
                    rep.fitted_constant = ratio;
                    rep.worst_point = {xi1, xi2, xi3};
                }
            }
        }
        return rep;
    }

    if (which == "badphase") {
        // Exhaustive dyadic sweep of |Phi_{++-}| >= Lambda(xi3)/2 under the
        // frequency gap max{k1,k2} <= k3 - gap.  Signs of the xi_i are sampled.
        const SignTuple bad = SignTuple::parse("++-");
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int k3 = -1; k3 <= k3_max; ++k3) {
            for (int k1 = -1; k1 <= k3 - gap; ++k1) {
                for (int k2 = -1; k2 <= k3 - gap; ++k2) {
                    const auto [lo1, hi1] = annulus(k1);
                    const auto [lo2, hi2] = annulus(k2);
                    const auto [lo3, hi3] = annulus(k3);
                    for (std::size_t i = 0; i < samples_per_cell; ++i) {
                        const double a1 = lo1 + (hi1 - lo1) * u01(rng);
                        const double a2 = lo2 + (hi2 - lo2) * u01(rng);
                        const double a3 = lo3 + (hi3 - lo3) * u01(rng);
                        const double xi1 = u01(rng) < 0.5 ? a1 : -a1;
                        const double xi2 = u01(rng) < 0.5 ? a2 : -a2;
                        const double xi3 = u01(rng) < 0.5 ? a3 : -a3;
                        const double ph = std::abs(phase3(xi1, xi2, xi3, bad));
                        const double floor_val = 0.5 * Lambda(xi3);
                        ++rep.samples;
                        const double margin = floor_val / ph;  // must stay <= 1
                        if (margin > rep.fitted_constant) {
                            rep.fitted_constant = margin;
                            rep.worst_point = {xi1, xi2, xi3};
                        }
                        if (ph < floor_val) ++rep.violations;
                    }
                }
            }
        }
        return rep;
    }

    throw std::invalid_argument("audit_phase_bounds: unknown bound id \"" + which + "\"");
}

GradientAuditReport audit_gradient_bounds(int k1_max, std::size_t samples_per_cell,
                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    GradientAuditReport rep;
    rep.lower_constant = std::numeric_limits<double>::infinity();
    for (int k1 = -1; k1 <= k1_max; ++k1) {
        const auto [lo1, hi1] = annulus(k1);
        for (std::size_t i = 0; i < samples_per_cell; ++i) {
            // |xi - eta| in the k1 annulus, |xi| <= 2^{k1}-scale, eta != 0.
            const double d = (lo1 + (hi1 - lo1) * u01(rng)) * (u01(rng) < 0.5 ? 1.0 : -1.0);
            const double xi = 1.6 * pow2(k1) * (2.0 * u01(rng) - 1.0);
            const double eta = xi - d;
            if (std::abs(eta) < 1e-12) continue;
            const auto g = phase_gradients(xi, eta, 0.0);
            const double lower = std::abs(g.d_xi) / (pow2(-3 * k1) * std::abs(eta));
            const double upper = std::abs(g.d_xi) / std::abs(eta);
            rep.lower_constant = std::min(rep.lower_constant, lower);
            rep.upper_constant = std::max(rep.upper_constant, upper);
            ++rep.samples;
        }
    }
    return rep;
}

double chi(double s) {
    if (s <= 1.0) return 0.0;
    if (s >= 2.0) return 1.0;
    const double up = bump_g(s - 1.0);
    const double down = bump_g(2.0 - s);
    return up / (up + down);
}

double ChiPartition::high(double eta) const {
    return chi(t * std::abs(eta) / pow2(j + 3 * k1 + M));
}

double ChiPartition::low(double eta) const {
    return 1.0 - chi(t * std::abs(eta) / pow2(j - M));
}

double ChiPartition::med(double eta) const { return (1.0 - high(eta)) * (1.0 - low(eta)); }

ChiPartition chi_partition(double t, int j, int k1, int M) {
    if (t < 0.0) throw std::invalid_argument("chi_partition: t must be >= 0");
    if (j < -1) throw std::invalid_argument("chi_partition: j must be >= -1");
    if (k1 < -1) throw std::invalid_argument("chi_partition: k1 must be >= -1");
    if (M < 3)
        throw std::invalid_argument("chi_partition: M must be >= 3 (high/low supports would overlap)");
    return ChiPartition{t, j, k1, M};
}

}  // namespace kg
