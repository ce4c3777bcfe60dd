#ifndef KG_PSEUDOPRODUCT_HPP
#define KG_PSEUDOPRODUCT_HPP

#include <map>
#include <optional>
#include <string>

#include "kg/phases.hpp"

namespace kg {

// Generators of the quadratic/cubic symbol families:
//   1, 1/Lambda(xi_i), xi_i/Lambda(xi_i)  (i = slot index 1..arity).
enum class Gen { One, InvL1, InvL2, InvL3, XiOverL1, XiOverL2, XiOverL3 };

Gen gen_from_token(const std::string& token);
std::string gen_token(Gen g);

struct SymbolTerm {
    std::vector<Gen> gens;  // empty product = 1
    cplx coef{0.0, 0.0};
};
using TermList = std::vector<SymbolTerm>;

// Per-nonlinearity coefficient tables: one term list per sign tuple for the
// quadratic family a and the cubic family b.  Tables are data; new
// nonlinearities over the same generator vocabulary need no code changes.
struct SymbolTables {
    std::map<std::string, TermList> a;  // keys "++", "+-", "-+", "--"
    std::map<std::string, TermList> b;  // keys "+++", ..., "---"

    static SymbolTables for_u_squared();
    static SymbolTables for_dtu_sq_dxu();
    static SymbolTables generic_audit();
    static SymbolTables merged(const SymbolTables& p, const SymbolTables& q);
    static SymbolTables from_json(const std::string& text);
    std::string to_json() const;
};

// A Fourier multiplier symbol of arity 2 or 3 with provenance.  When
// `separable` holds unary factors s_i, the symbol is coef * prod s_i(xi_i)
// and t2/t3 take the FFT fast path.
struct SymbolSpec {
    int arity = 2;
    std::string tag = "custom";
    SignTuple signs;
    std::function<cplx(double, double, double)> eval;  // arity-2 ignores xi3

    struct Separable {
        std::vector<UnarySymbol> factors;
        cplx coef{1.0, 0.0};
    };
    std::optional<Separable> separable;

    cplx operator()(double xi1, double xi2, double xi3 = 0.0) const { return eval(xi1, xi2, xi3); }
};

SymbolSpec make_constant_symbol(int arity, cplx value = cplx(1.0, 0.0));
SymbolSpec make_separable2(UnarySymbol s1, UnarySymbol s2, cplx coef = cplx(1.0, 0.0));
SymbolSpec make_separable3(UnarySymbol s1, UnarySymbol s2, UnarySymbol s3,
                           cplx coef = cplx(1.0, 0.0));

// Families from the normal-form algebra, built over a coefficient table:
//   "a"         quadratic symbol a_{m1 m2}
//   "aI"        a^I: identity for leading +, conjugate-reflection for leading -
//               (signs argument carries (nu, m1, m2) as a 3-tuple)
//   "b"         cubic symbol b_{m1 m2 m3}
//   "bI"        the composed cubic b^I_{sigma m1 m2}
//   "mI","mII"  the symmetrized cubic sums; "m" = mI + mII (A_Phi tuples only)
//   "phi_inv_a" Phi^{-1}_{m1 m2} a_{m1 m2}
//   "phi_inv_m" Phi^{-1}_{m1 m2 m3} m_{m1 m2 m3}; the (++-) divided symbol is
//               refused unless gap_restricted is set, since its phase vanishes
//               on a resonant set without the frequency-gap restriction.
SymbolSpec build_symbol(const std::string& family, const SignTuple& signs,
                        const SymbolTables& tables, bool gap_restricted = false);

// Pseudoproduct operators.  Output spectrum at xi:
//   t2: (1/L)   sum_{m1+m2 = m}    sym(xi_{m1}, xi_{m2}) fhat(xi_{m1}) ghat(xi_{m2})
//   t3: (1/L^2) sum_{m1+m2+m3 = m} sym(...) fhat ghat hhat
// over grid modes (out-of-range modes contribute zero), i.e. the lattice
// discretization of the continuum pseudoproduct with d eta = 2 pi / L.
// Constant symbols reproduce pointwise products.  Separable symbols run via
// filtered fields multiplied on a zero-padded grid, which matches the direct
// sum exactly.
Field t2(const SymbolSpec& sym, const Field& f, const Field& g);
Field t3(const SymbolSpec& sym, const Field& f, const Field& g, const Field& h);

// Empirical operator-norm audits of the multiplier lemmas.  For random
// dyadically localized inputs, the output L^2 norm is divided by the lemma's
// dyadic factor times the input norms; the report keeps the max ratio per
// k-scalar and the quartile trend statistic.
struct BoundAuditReport {
    std::string lemma;
    std::vector<std::pair<int, double>> per_k;  // (k-scalar, max ratio)
    double bottom_quartile_max = 0.0;
    double top_quartile_max = 0.0;
    bool no_growth = false;  // top-quartile max <= 4x bottom-quartile max
    std::string to_json() const;
};

// lemma ids: "bilinear-a", "trilin", "trilin-good", "trilin-bad"
BoundAuditReport bound_audit(const std::string& lemma_id, const SymbolTables& tables,
                             const Grid& grid, int k_lo, int k_hi, std::size_t trials,
                             std::uint64_t seed, int gap = 5);

}  // namespace kg

#endif
