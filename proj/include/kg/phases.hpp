#ifndef KG_PHASES_HPP
#define KG_PHASES_HPP

#include <array>
#include <cstdint>
#include <string>

#include "kg/spectral.hpp"

namespace kg {

// Ordered sign tuple (+/-) of arity 2 or 3.
struct SignTuple {
    std::array<int8_t, 3> s{1, 1, 1};
    int arity = 2;

    static SignTuple of(int s1, int s2);
    static SignTuple of(int s1, int s2, int s3);
    static SignTuple parse(const std::string& text);  // e.g. "+-", "++-"

    int operator[](int i) const { return s[static_cast<std::size_t>(i)]; }
    std::string str() const;

    // A_Phi = {(+++), (++-), (+--), (---)}; the "good" subset omits (++-).
    bool in_a_phi() const;
    bool is_good() const;
};

// Resonance functions:
//   Phi_{m1 m2}(xi1, xi2)      = -Lambda(xi1+xi2) + m1 Lambda(xi1) + m2 Lambda(xi2)
//   Phi_{m1 m2 m3}(xi1,xi2,xi3)= -Lambda(xi1+xi2+xi3) + sum_i m_i Lambda(xi_i)
double phase2(double xi1, double xi2, const SignTuple& signs);
double phase3(double xi1, double xi2, double xi3, const SignTuple& signs);

// Gradients of the (++-) phase after the change of variables
// xi1 = xi - eta, xi2 = eta - zeta, xi3 = zeta:
//   d_xi Phi   = Lambda'(xi - eta)  - Lambda'(xi)
//   d_zeta Phi = Lambda'(zeta - eta) - Lambda'(zeta)
struct PhaseGradients {
    double d_xi = 0.0;
    double d_zeta = 0.0;
};
PhaseGradients phase_gradients(double xi, double eta, double zeta);

struct PhaseAuditReport {
    std::string bound_id;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double fitted_constant = 0.0;           // max normalized ratio observed
    std::array<double, 3> worst_point{0, 0, 0};
    std::string to_json() const;
};

// Normalized-ratio audits of the phase lower bounds.
//  "bdd1":     max over sign pairs of |Phi|^{-1} / (1 + min{|xi1+xi2|,|xi1|,|xi2|})
//  "3phase":   same in three variables over the good sign triples
//  "badphase": exhaustive dyadic sweep k1,k2 <= k3-gap, k3 <= k3_max; checks
//              |Phi_{++-}| >= Lambda(xi3)/2 exactly.  Any violation is fatal
//              to the audit (reported with the witness point).
PhaseAuditReport audit_phase_bounds(const std::string& which, std::size_t samples_per_cell,
                                    double range, std::uint64_t seed, int gap = 5,
                                    int k3_max = 14);

// Empirical constants for the two-sided gradient bound
// 2^{-3 k1} |eta| <~ |d_xi Phi| <~ |eta| on dyadically localized samples.
struct GradientAuditReport {
    double lower_constant = 0.0;  // min of |d_xi Phi| / (2^{-3k1} |eta|)
    double upper_constant = 0.0;  // max of |d_xi Phi| / |eta|
    std::size_t samples = 0;
};
GradientAuditReport audit_gradient_bounds(int k1_max, std::size_t samples_per_cell,
                                          std::uint64_t seed);

// Smooth step chi: 0 for s <= 1, 1 for s >= 2 (same bump primitive as psi).
double chi(double s);

// Frequency cutoffs splitting eta-space by the size of t|eta| relative to the
// space-time dyadic scales:
//   chi_high(eta) = chi(t|eta| / 2^{j+3k1+M})
//   chi_low(eta)  = 1 - chi(t|eta| / 2^{j-M})
//   chi_med       = (1-chi_high)(1-chi_low)
// The three sum to 1 identically once the high/low supports are disjoint,
// which M >= 3 guarantees.
// Default gap constant M1 (= M2) for the frequency cutoffs; overridable at
// every call site, with audits re-run under overrides.
inline constexpr int kDefaultChiGap = 8;

struct ChiPartition {
    double t;
    int j, k1, M;
    double high(double eta) const;
    double low(double eta) const;
    double med(double eta) const;
};
ChiPartition chi_partition(double t, int j, int k1, int M);

}  // namespace kg

#endif
