#ifndef KG_SPECTRAL_HPP
#define KG_SPECTRAL_HPP

#include <functional>

#include "kg/field.hpp"

namespace kg {

// Dispersion relation of the Klein-Gordon operator and its derivatives.
inline double Lambda(double xi) { return std::sqrt(1.0 + xi * xi); }
inline double dLambda(double xi) { return xi / std::sqrt(1.0 + xi * xi); }
inline double ddLambda(double xi) { double s = 1.0 + xi * xi; return 1.0 / (s * std::sqrt(s)); }

// Fourier convention, fixed once and used everywhere:
//   fhat(xi)  = integral e^{-i x xi} f(x) dx     -> dx * sum_p f(x_p) e^{-i x_p xi_m}
//   f(x)      = (2 pi)^{-1} integral e^{i x xi} fhat(xi) dxi -> (1/L) * sum_m fhat(xi_m) e^{i x_p xi_m}
// Plancherel under this convention: dx*sum|f_p|^2 == (1/L)*sum|fhat_m|^2.
//
// Spectra are stored in FFT slot order (m = 0..n/2-1, -n/2..-1); Grid::xi(s)
// gives the frequency of slot s.
std::vector<cplx> forward(const Field& f);
Field inverse(const Grid& g, const std::vector<cplx>& fhat);

using UnarySymbol = std::function<cplx(double)>;

// F^{-1}( sigma(xi) * F f ).  Exact on band-limited inputs.  Throws if sigma
// is non-finite at some grid frequency (the message names the offending xi).
Field apply_symbol(const Field& f, const UnarySymbol& sigma);

// e^{sign * i t Lambda} f.  Unitary in L^2.
Field propagate(const Field& f, double t, int sign);

// Solution of the free Klein-Gordon equation with data (u0, u1):
//   (e^{itL} + e^{-itL})/2 u0 + (e^{itL} - e^{-itL})/(2i) L^{-1} u1.
Field linear_kg_solution(const Field& u0, const Field& u1, double t);
// Its time derivative (used by tests and the half-KG reduction).
Field linear_kg_velocity(const Field& u0, const Field& u1, double t);

// Zero-padding helpers for alias-free products: pad embeds the spectrum of f
// into a grid with `factor`*n points (same box), truncate is the adjoint.
Field pad_field(const Field& f, std::size_t factor = 2);
Field truncate_field(const Field& f_fine, const Grid& coarse);

// Fraction of spectral energy carried by modes |m| > n/3 (the band zeroed by
// the 2/3 rule), and the corresponding truncation.
double dealias_tail_fraction(const std::vector<cplx>& fhat);
void dealias_truncate(std::vector<cplx>& fhat);

// Relative spectral amplitude at the unpaired Nyquist mode; experiment inputs
// are expected to stay below 1e-12 here.
double nyquist_amplitude(const Field& f);

}  // namespace kg

#endif
