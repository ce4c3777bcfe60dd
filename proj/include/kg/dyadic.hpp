#ifndef KG_DYADIC_HPP
#define KG_DYADIC_HPP

#include <map>

#include "kg/spectral.hpp"

namespace kg {

// Base smooth cutoff psi: [0,1]-valued, even, equal to 1 on [-5/4, 5/4] and
// vanishing outside [-8/5, 8/5].  The transition uses the standard smooth
// step built from g(s) = exp(-1/s), so psi is C^infinity and reproducible
// bit-for-bit from the formula.
double psi(double x);

// Dyadic annulus cutoffs:
//   psi_k(x) = psi(|x|/2^k) - psi(|x|/2^{k-1})   for k >= 0,
//   psi_{-1}(x) = psi(2|x|).
// Throws for k < -1.
double psi_k(int k, double x);

// psi_I = sum of psi_k over integer k in [lo, hi] intersect [-1, inf).
double psi_interval(int lo, int hi, double x);

// Default truncation bounds for dyadic sums on a grid:
//   j_max = ceil(log2(L)), k_max = ceil(log2(xi_max)).
int default_j_max(const Grid& g);
int default_k_max(const Grid& g);

// Littlewood-Paley frequency projection P_k: multiplier psi_k(xi).
Field project_freq(const Field& f, int k);
// P_I for the integer interval [lo, hi].
Field project_interval(const Field& f, int lo, int hi);
// Physical localizer Q_j: pointwise product with psi_j(x).
Field localize_phys(const Field& f, int j);

// Frequency-interaction sets.  X_k collects the (k1,k2) that can contribute
// to P_k(P_{k1} f * P_{k2} g), Y_k the trilinear analogue:
//   X_k^1: |max{k1,k2} - k| <= 8
//   X_k^2: max{k1,k2} >= k+8 and |k1-k2| <= 8
//   Y_k^1: |max{k1,k2,k3} - k| <= 4
//   Y_k^2: k+4 <= max{k1,k2,k3} <= med{k1,k2,k3} + 4
bool interaction_set_x(int k, int k1, int k2);
bool interaction_set_y(int k, int k1, int k2, int k3);

// Materialized family {Q_j P_k f} for j,k in [-1, j_max] x [-1, k_max].
class DyadicDecomposition {
  public:
    DyadicDecomposition(const Field& f, int j_max, int k_max);

    int j_max() const { return j_max_; }
    int k_max() const { return k_max_; }
    const Field& component(int j, int k) const;

    // sum_{j<=j_max} Q_j P_k f (equals P_k f where the physical partition covers).
    Field sum_over_j(int k) const;
    // sum over all (j,k) of the stored components.
    Field total() const;

  private:
    std::size_t index(int j, int k) const;
    int j_max_, k_max_;
    std::vector<Field> parts_;
};

// Measured Bernstein ratio ||P_k f||_inf / (2^{k/2} ||P_k f||_2); returns 0
// for vanishing P_k f.
double bernstein_ratio(const Field& f, int k);

}  // namespace kg

#endif
