#ifndef KG_NORMS_HPP
#define KG_NORMS_HPP

#include <string>

#include "kg/dyadic.hpp"

namespace kg {

// Outcome of a norm evaluation, with enough bookkeeping to reproduce it:
// parameters, truncation bounds and (for Z_alpha) the per-(j,k) table.
struct NormReport {
    std::string kind;
    double value = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    int N = 0;
    double s = 0.0;
    int j_max = -1;
    int k_max = -1;
    // Entries (j, k, weighted contribution); re-summing gives `value`.
    std::vector<std::tuple<int, int, double>> contributions;

    std::string to_json() const;
};

// Z_alpha norm: sum_{j,k >= -1} 2^{j alpha + N1 k} ||Q_j P_k f||_{L^2},
// truncated at (j_max, k_max); N1 defaults to 12.
NormReport znorm(const Field& f, double alpha, int j_max, int k_max, int N1 = 12);
NormReport znorm(const Field& f, double alpha);  // default truncation bounds

// ||Lambda^N f||_{L^2}.
double sobolev_norm(const Field& f, int N);
// max over derivative orders 0..N of ||d^j f||_{L^infty} (spectral differentiation).
double winf_norm(const Field& f, int N);
// ||<x>^beta Lambda^s f||_{L^2} with <x> = sqrt(1+x^2).
double weighted_norm(const Field& f, double beta, double s);

// Ratio scan of ||f||_{Z_alpha} against ||<x>^beta Lambda^14 f||_{L^2} over a
// sample family.  Reports the fitted envelope constant (the max ratio) and
// every individual ratio.
struct WeightAuditReport {
    double alpha = 0.0;
    double beta = 0.0;
    double fitted_constant = 0.0;
    std::vector<double> ratios;
};
WeightAuditReport znorm_weight_audit(const std::vector<Field>& family, double alpha, double beta);

}  // namespace kg

#endif
