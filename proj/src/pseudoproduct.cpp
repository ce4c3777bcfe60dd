#include "kg/pseudoproduct.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "kg/dyadic.hpp"

namespace kg {

namespace {

double pow2(int k) { return std::ldexp(1.0, k); }

cplx gen_value(Gen g, double xi1, double xi2, double xi3) {
    switch (g) {
        case Gen::One: return cplx(1.0, 0.0);
        case Gen::InvL1: return cplx(1.0 / Lambda(xi1), 0.0);
        case Gen::InvL2: return cplx(1.0 / Lambda(xi2), 0.0);
        case Gen::InvL3: return cplx(1.0 / Lambda(xi3), 0.0);
        case Gen::XiOverL1: return cplx(xi1 / Lambda(xi1), 0.0);
        case Gen::XiOverL2: return cplx(xi2 / Lambda(xi2), 0.0);
        case Gen::XiOverL3: return cplx(xi3 / Lambda(xi3), 0.0);
    }
    return cplx(0.0, 0.0);
}

cplx eval_terms(const TermList& terms, double xi1, double xi2, double xi3) {
    cplx acc(0.0, 0.0);
    for (const auto& term : terms) {
        cplx prod = term.coef;
        for (Gen g : term.gens) prod *= gen_value(g, xi1, xi2, xi3);
        acc += prod;
    }
    return acc;
}

const TermList& table_at(const std::map<std::string, TermList>& table, const std::string& key) {
    static const TermList empty;
    auto it = table.find(key);
    return it == table.end() ? empty : it->second;
}

std::string sign_key2(int s1, int s2) {
    std::string k;
    k += s1 > 0 ? '+' : '-';
    k += s2 > 0 ? '+' : '-';
    return k;
}

std::string sign_key3(int s1, int s2, int s3) {
    std::string k = sign_key2(s1, s2);
    k += s3 > 0 ? '+' : '-';
    return k;
}

// Evaluators for the algebra.  All take the tables by reference; SymbolSpec
// lambdas capture the tables by value (they are small maps).

cplx eval_a(const SymbolTables& tb, int m1, int m2, double xi1, double xi2) {
    return eval_terms(table_at(tb.a, sign_key2(m1, m2)), xi1, xi2, 0.0);
}

// a^I_{+ m1 m2} = a_{m1 m2};  a^I_{- m1 m2}(xi1, xi2) = conj(a_{-m1,-m2}(-xi1,-xi2)).
cplx eval_aI(const SymbolTables& tb, int nu, int m1, int m2, double xi1, double xi2) {
    if (nu > 0) return eval_a(tb, m1, m2, xi1, xi2);
    return std::conj(eval_a(tb, -m1, -m2, -xi1, -xi2));
}

cplx eval_b(const SymbolTables& tb, int m1, int m2, int m3, double xi1, double xi2, double xi3) {
    return eval_terms(table_at(tb.b, sign_key3(m1, m2, m3)), xi1, xi2, xi3);
}

cplx eval_phi_inv_a(const SymbolTables& tb, int m1, int m2, double xi1, double xi2) {
    return eval_a(tb, m1, m2, xi1, xi2) / phase2(xi1, xi2, SignTuple::of(m1, m2));
}

// b^I_{sigma m1 m2}(xi1,xi2,xi3) =
//   i sum_mu (Phi^{-1}_{mu sigma} a_{mu sigma})(xi2+xi3, xi1) a^I_{mu m1 m2}(xi2, xi3)
// + i sum_nu (Phi^{-1}_{sigma nu} a_{sigma nu})(xi1, xi2+xi3) a^I_{nu m1 m2}(xi2, xi3)
cplx eval_bI(const SymbolTables& tb, int sigma, int m1, int m2, double xi1, double xi2,
             double xi3) {
    cplx acc(0.0, 0.0);
    for (int mu : {1, -1}) {
        acc += eval_phi_inv_a(tb, mu, sigma, xi2 + xi3, xi1) * eval_aI(tb, mu, m1, m2, xi2, xi3);
        acc += eval_phi_inv_a(tb, sigma, mu, xi1, xi2 + xi3) * eval_aI(tb, mu, m1, m2, xi2, xi3);
    }
    return cplx(0.0, 1.0) * acc;
}

cplx eval_mI(const SymbolTables& tb, const SignTuple& sg, double xi1, double xi2, double xi3) {
    const std::string key = sg.str();
    if (key == "+++") return eval_bI(tb, 1, 1, 1, xi1, xi2, xi3);
    if (key == "++-")
        return eval_bI(tb, 1, 1, -1, xi1, xi2, xi3) + eval_bI(tb, 1, -1, 1, xi1, xi3, xi2) +
               eval_bI(tb, -1, 1, 1, xi3, xi2, xi1);
    if (key == "+--")
        return eval_bI(tb, 1, -1, -1, xi1, xi2, xi3) + eval_bI(tb, -1, 1, -1, xi2, xi1, xi3) +
               eval_bI(tb, -1, -1, 1, xi3, xi2, xi1);
    if (key == "---") return eval_bI(tb, -1, -1, -1, xi1, xi2, xi3);
    throw std::invalid_argument("mI is defined only for sign tuples in A_Phi, got " + key);
}

cplx eval_mII(const SymbolTables& tb, const SignTuple& sg, double xi1, double xi2, double xi3) {
    const std::string key = sg.str();
    if (key == "+++") return eval_b(tb, 1, 1, 1, xi1, xi2, xi3);
    if (key == "++-")
        return eval_b(tb, 1, 1, -1, xi1, xi2, xi3) + eval_b(tb, 1, -1, 1, xi1, xi3, xi2) +
               eval_b(tb, -1, 1, 1, xi3, xi2, xi1);
    if (key == "+--")
        return eval_b(tb, 1, -1, -1, xi1, xi2, xi3) + eval_b(tb, -1, 1, -1, xi2, xi1, xi3) +
               eval_b(tb, -1, -1, 1, xi3, xi2, xi1);
    if (key == "---") return eval_b(tb, -1, -1, -1, xi1, xi2, xi3);
    throw std::invalid_argument("mII is defined only for sign tuples in A_Phi, got " + key);
}

}  // namespace

Gen gen_from_token(const std::string& token) {
    if (token == "one" || token == "1") return Gen::One;
    if (token == "invL1") return Gen::InvL1;
    if (token == "invL2") return Gen::InvL2;
    if (token == "invL3") return Gen::InvL3;
    if (token == "xiL1") return Gen::XiOverL1;
    if (token == "xiL2") return Gen::XiOverL2;
    if (token == "xiL3") return Gen::XiOverL3;
    throw std::invalid_argument("unknown symbol generator token \"" + token + "\"");
}

std::string gen_token(Gen g) {
    switch (g) {
        case Gen::One: return "one";
        case Gen::InvL1: return "invL1";
        case Gen::InvL2: return "invL2";
        case Gen::InvL3: return "invL3";
        case Gen::XiOverL1: return "xiL1";
        case Gen::XiOverL2: return "xiL2";
        case Gen::XiOverL3: return "xiL3";
    }
    return "?";
}

SymbolTables SymbolTables::for_u_squared() {
    // u^2 with u = Lambda^{-1}(U - bar U)/(2i):
    //   a_{m1 m2} = -(m1 m2 / 4) / (Lambda(xi1) Lambda(xi2)).
    SymbolTables tb;
    for (int m1 : {1, -1})
        for (int m2 : {1, -1}) {
            SymbolTerm term;
            term.gens = {Gen::InvL1, Gen::InvL2};
            term.coef = cplx(-0.25 * m1 * m2, 0.0);
            tb.a[sign_key2(m1, m2)] = {term};
        }
    return tb;
}

SymbolTables SymbolTables::for_dtu_sq_dxu() {
    // (dt u)^2 dx u with dt u = (U + bar U)/2, dx u = dx Lambda^{-1}(U - bar U)/(2i):
    //   b_{m1 m2 m3} = (m3 / 8) * xi3/Lambda(xi3).
    SymbolTables tb;
    for (int m1 : {1, -1})
        for (int m2 : {1, -1})
            for (int m3 : {1, -1}) {
                SymbolTerm term;
                term.gens = {Gen::XiOverL3};
                term.coef = cplx(0.125 * m3, 0.0);
                tb.b[sign_key3(m1, m2, m3)] = {term};
            }
    return tb;
}

SymbolTables SymbolTables::generic_audit() {
    // Exercises every generator with O(1) coefficients; used by the operator
    // bound audits so the dyadic factors are probed without the extra decay
    // the shipped nonlinearities carry.
    SymbolTables tb;
    for (int m1 : {1, -1})
        for (int m2 : {1, -1}) {
            TermList terms;
            terms.push_back({{}, cplx(1.0, 0.0)});
            terms.push_back({{Gen::XiOverL1, Gen::XiOverL2}, cplx(0.5, 0.25)});
            terms.push_back({{Gen::InvL1, Gen::InvL2}, cplx(-0.25 * m1 * m2, 0.0)});
            terms.push_back({{Gen::XiOverL1, Gen::InvL2}, cplx(0.0, 0.3 * m1)});
            tb.a[sign_key2(m1, m2)] = std::move(terms);
        }
    for (int m1 : {1, -1})
        for (int m2 : {1, -1})
            for (int m3 : {1, -1}) {
                TermList terms;
                terms.push_back({{}, cplx(0.7, 0.0)});
                terms.push_back({{Gen::XiOverL1, Gen::XiOverL2, Gen::XiOverL3}, cplx(0.4, -0.2)});
                terms.push_back({{Gen::XiOverL3}, cplx(0.125 * m3, 0.0)});
                terms.push_back({{Gen::InvL1}, cplx(0.0, -0.5 * m2)});
                tb.b[sign_key3(m1, m2, m3)] = std::move(terms);
            }
    return tb;
}

SymbolTables SymbolTables::merged(const SymbolTables& p, const SymbolTables& q) {
    SymbolTables out = p;
    for (const auto& [key, terms] : q.a) {
        auto& dst = out.a[key];
        dst.insert(dst.end(), terms.begin(), terms.end());
    }
    for (const auto& [key, terms] : q.b) {
        auto& dst = out.b[key];
        dst.insert(dst.end(), terms.begin(), terms.end());
    }
    return out;
}

SymbolTables SymbolTables::from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    SymbolTables tb;
    for (const auto& entry : doc.at("entries")) {
        const std::string family = entry.at("family").get<std::string>();
        const std::string signs = entry.at("signs").get<std::string>();
        TermList terms;
        for (const auto& jterm : entry.at("terms")) {
            SymbolTerm term;
            for (const auto& tok : jterm.at("gens")) term.gens.push_back(gen_from_token(tok.get<std::string>()));
            const auto& c = jterm.at("coef");
            term.coef = cplx(c.at(0).get<double>(), c.at(1).get<double>());
            terms.push_back(std::move(term));
        }
        if (family == "a") {
            if (signs.size() != 2) throw std::invalid_argument("family a requires 2 signs");
            tb.a[signs] = std::move(terms);
        } else if (family == "b") {
            if (signs.size() != 3) throw std::invalid_argument("family b requires 3 signs");
            tb.b[signs] = std::move(terms);
        } else {
            throw std::invalid_argument("coefficient tables hold only families a and b, got \"" + family + "\"");
        }
    }
    return tb;
}

std::string SymbolTables::to_json() const {
    nlohmann::json entries = nlohmann::json::array();
    auto emit = [&entries](const std::string& family, const std::map<std::string, TermList>& table) {
        for (const auto& [signs, terms] : table) {
            nlohmann::json jterms = nlohmann::json::array();
            for (const auto& term : terms) {
                nlohmann::json gens = nlohmann::json::array();
                for (Gen g : term.gens) gens.push_back(gen_token(g));
                jterms.push_back({{"gens", gens}, {"coef", {term.coef.real(), term.coef.imag()}}});
            }
            entries.push_back({{"family", family}, {"signs", signs}, {"terms", jterms}});
        }
    };
    emit("a", a);
    emit("b", b);
    return nlohmann::json{{"entries", entries}}.dump(2);
}

SymbolSpec make_constant_symbol(int arity, cplx value) {
    SymbolSpec s;
    s.arity = arity;
    s.tag = "custom";
    s.eval = [value](double, double, double) { return value; };
    SymbolSpec::Separable sep;
    sep.coef = value;
    for (int i = 0; i < arity; ++i) sep.factors.push_back([](double) { return cplx(1.0, 0.0); });
    s.separable = std::move(sep);
    return s;
}

SymbolSpec make_separable2(UnarySymbol s1, UnarySymbol s2, cplx coef) {
    SymbolSpec s;
    s.arity = 2;
    s.tag = "custom";
    s.eval = [s1, s2, coef](double xi1, double xi2, double) { return coef * s1(xi1) * s2(xi2); };
    s.separable = SymbolSpec::Separable{{std::move(s1), std::move(s2)}, coef};
    return s;
}

SymbolSpec make_separable3(UnarySymbol s1, UnarySymbol s2, UnarySymbol s3, cplx coef) {
    SymbolSpec s;
    s.arity = 3;
    s.tag = "custom";
    s.eval = [s1, s2, s3, coef](double xi1, double xi2, double xi3) {
        return coef * s1(xi1) * s2(xi2) * s3(xi3);
    };
    s.separable = SymbolSpec::Separable{{std::move(s1), std::move(s2), std::move(s3)}, coef};
    return s;
}

SymbolSpec build_symbol(const std::string& family, const SignTuple& signs,
                        const SymbolTables& tables, bool gap_restricted) {
    SymbolSpec spec;
    spec.tag = family;
    spec.signs = signs;
    const SymbolTables tb = tables;  // captured by value below

    auto need_arity = [&](int arity) {
        if (signs.arity != arity)
            throw std::invalid_argument("build_symbol: family \"" + family + "\" needs arity " +
                                        std::to_string(arity) + ", got signs \"" + signs.str() + "\"");
        spec.arity = arity;
    };

    if (family == "a") {
        need_arity(2);
        const int m1 = signs[0], m2 = signs[1];
        spec.eval = [tb, m1, m2](double x1, double x2, double) { return eval_a(tb, m1, m2, x1, x2); };
        // single-term tables give a separable fast path
        const TermList& terms = table_at(tb.a, sign_key2(m1, m2));
        if (terms.size() == 1) {
            const SymbolTerm term = terms[0];
            auto factor = [term](int slot) -> UnarySymbol {
                std::vector<Gen> mine;
                for (Gen g : term.gens) {
                    const bool slot1 = (g == Gen::InvL1 || g == Gen::XiOverL1);
                    if ((slot == 1 && slot1) || (slot == 2 && !slot1 && g != Gen::One)) mine.push_back(g);
                }
                return [mine, slot](double xi) {
                    cplx acc(1.0, 0.0);
                    for (Gen g : mine)
                        acc *= gen_value(g, slot == 1 ? xi : 0.0, slot == 2 ? xi : 0.0, 0.0);
                    return acc;
                };
            };
            spec.separable = SymbolSpec::Separable{{factor(1), factor(2)}, term.coef};
        }
        return spec;
    }
    if (family == "aI") {
        need_arity(3);  // signs carry (nu, m1, m2)
        const int nu = signs[0], m1 = signs[1], m2 = signs[2];
        spec.arity = 2;
        spec.eval = [tb, nu, m1, m2](double x1, double x2, double) {
            return eval_aI(tb, nu, m1, m2, x1, x2);
        };
        return spec;
    }
    if (family == "b") {
        need_arity(3);
        const int m1 = signs[0], m2 = signs[1], m3 = signs[2];
        spec.eval = [tb, m1, m2, m3](double x1, double x2, double x3) {
            return eval_b(tb, m1, m2, m3, x1, x2, x3);
        };
        return spec;
    }
    if (family == "bI") {
        need_arity(3);
        const int sg = signs[0], m1 = signs[1], m2 = signs[2];
        spec.eval = [tb, sg, m1, m2](double x1, double x2, double x3) {
            return eval_bI(tb, sg, m1, m2, x1, x2, x3);
        };
        return spec;
    }
    if (family == "mI" || family == "mII" || family == "m") {
        need_arity(3);
        if (!signs.in_a_phi())
            throw std::invalid_argument("build_symbol: m-family sign tuple must lie in A_Phi");
        const SignTuple sg = signs;
        if (family == "mI")
            spec.eval = [tb, sg](double x1, double x2, double x3) { return eval_mI(tb, sg, x1, x2, x3); };
        else if (family == "mII")
            spec.eval = [tb, sg](double x1, double x2, double x3) { return eval_mII(tb, sg, x1, x2, x3); };
        else
            spec.eval = [tb, sg](double x1, double x2, double x3) {
                return eval_mI(tb, sg, x1, x2, x3) + eval_mII(tb, sg, x1, x2, x3);
            };
        return spec;
    }
    if (family == "phi_inv_a") {
        need_arity(2);
        const int m1 = signs[0], m2 = signs[1];
        spec.eval = [tb, m1, m2](double x1, double x2, double) {
            return eval_phi_inv_a(tb, m1, m2, x1, x2);
        };
        return spec;
    }
    if (family == "phi_inv_m") {
        need_arity(3);
        if (!signs.in_a_phi())
            throw std::invalid_argument("build_symbol: phi_inv_m sign tuple must lie in A_Phi");
        if (!signs.is_good() && !gap_restricted)
            throw std::invalid_argument(
                "build_symbol: phi_inv_m with signs ++- is resonant; it is admissible only under "
                "the frequency-gap restriction (pass gap_restricted)");
        const SignTuple sg = signs;
        spec.eval = [tb, sg](double x1, double x2, double x3) {
            return (eval_mI(tb, sg, x1, x2, x3) + eval_mII(tb, sg, x1, x2, x3)) /
                   phase3(x1, x2, x3, sg);
        };
        return spec;
    }
    throw std::invalid_argument("build_symbol: unknown family \"" + family + "\"");
}

namespace {

// Natural-order spectrum: index i <-> mode m = i - n/2.
std::vector<cplx> natural_spectrum(const Field& f) {
    auto fhat = forward(f);
    const std::size_t n = f.grid.n();
    std::vector<cplx> nat(n);
    for (std::size_t s = 0; s < n; ++s)
        nat[static_cast<std::size_t>(f.grid.mode(s) + static_cast<long>(n) / 2)] = fhat[s];
    return nat;
}

Field from_natural_spectrum(const Grid& g, const std::vector<cplx>& nat) {
    const std::size_t n = g.n();
    std::vector<cplx> fhat(n);
    for (std::size_t s = 0; s < n; ++s)
        fhat[s] = nat[static_cast<std::size_t>(g.mode(s) + static_cast<long>(n) / 2)];
    return inverse(g, fhat);
}

void check_finite_symbol(cplx w, double x1, double x2, double x3) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        std::ostringstream msg;
        msg << "pseudoproduct: symbol non-finite at (" << x1 << ", " << x2 << ", " << x3 << ")";
        throw std::invalid_argument(msg.str());
    }
}

Field multiply_padded(const std::vector<Field>& filtered, cplx coef) {
    std::vector<Field> fine;
    fine.reserve(filtered.size());
    for (const auto& f : filtered) fine.push_back(pad_field(f, 2));
    Field prod = fine[0];
    for (std::size_t i = 1; i < fine.size(); ++i)
        for (std::size_t p = 0; p < prod.size(); ++p) prod.v[p] *= fine[i].v[p];
    prod *= coef;
    return truncate_field(prod, filtered[0].grid);
}

}  // namespace

namespace {

// Direct-summation cores on natural-order spectra.  Exactly-zero modes are
// skipped, so annulus-supported spectra never touch the symbol outside their
// support (the divided bad-phase symbol is singular on the resonant set).
std::vector<cplx> t2_core(const SymbolSpec& sym, const Grid& grid, const std::vector<cplx>& F,
                          const std::vector<cplx>& G) {
    const long half = static_cast<long>(grid.n()) / 2;
    const double dxi = grid.dxi();
    std::vector<cplx> out(grid.n(), cplx(0.0, 0.0));
    for (long m = -half; m < half; ++m) {
        cplx acc(0.0, 0.0);
        const long lo = std::max(-half, m - (half - 1));
        const long hi = std::min(half - 1, m + half);
        for (long m2 = lo; m2 <= hi; ++m2) {
            const long m1 = m - m2;
            const cplx fv = F[static_cast<std::size_t>(m1 + half)];
            const cplx gv = G[static_cast<std::size_t>(m2 + half)];
            if (fv == cplx(0.0, 0.0) || gv == cplx(0.0, 0.0)) continue;
            const double x1 = dxi * static_cast<double>(m1);
            const double x2 = dxi * static_cast<double>(m2);
            const cplx w = sym.eval(x1, x2, 0.0);
            check_finite_symbol(w, x1, x2, 0.0);
            acc += w * fv * gv;
        }
        out[static_cast<std::size_t>(m + half)] = acc / grid.box_length();
    }
    return out;
}

std::vector<cplx> t3_core(const SymbolSpec& sym, const Grid& grid, const std::vector<cplx>& F,
                          const std::vector<cplx>& G, const std::vector<cplx>& H) {
    const long half = static_cast<long>(grid.n()) / 2;
    const double dxi = grid.dxi();
    const double inv_l2 = 1.0 / (grid.box_length() * grid.box_length());
    std::vector<cplx> out(grid.n(), cplx(0.0, 0.0));
    for (long m = -half; m < half; ++m) {
        cplx acc(0.0, 0.0);
        for (long m1 = -half; m1 < half; ++m1) {
            const cplx fv = F[static_cast<std::size_t>(m1 + half)];
            if (fv == cplx(0.0, 0.0)) continue;
            const double x1 = dxi * static_cast<double>(m1);
            const long rem = m - m1;
            const long lo = std::max(-half, rem - (half - 1));
            const long hi = std::min(half - 1, rem + half);
            for (long m2 = lo; m2 <= hi; ++m2) {
                const long m3 = rem - m2;
                const cplx gv = G[static_cast<std::size_t>(m2 + half)];
                const cplx hv = H[static_cast<std::size_t>(m3 + half)];
                if (gv == cplx(0.0, 0.0) || hv == cplx(0.0, 0.0)) continue;
                const double x2 = dxi * static_cast<double>(m2);
                const double x3 = dxi * static_cast<double>(m3);
                const cplx w = sym.eval(x1, x2, x3);
                check_finite_symbol(w, x1, x2, x3);
                acc += w * fv * gv * hv;
            }
        }
        out[static_cast<std::size_t>(m + half)] = acc * inv_l2;
    }
    return out;
}

}  // namespace

Field t2(const SymbolSpec& sym, const Field& f, const Field& g) {
    if (sym.arity != 2) throw std::invalid_argument("t2: symbol arity must be 2");
    if (!f.grid.same_as(g.grid)) throw std::invalid_argument("t2: grid mismatch");

    if (sym.separable) {
        Field ff = apply_symbol(f, sym.separable->factors[0]);
        Field gg = apply_symbol(g, sym.separable->factors[1]);
        return multiply_padded({ff, gg}, sym.separable->coef);
    }
    return from_natural_spectrum(f.grid,
                                 t2_core(sym, f.grid, natural_spectrum(f), natural_spectrum(g)));
}

Field t3(const SymbolSpec& sym, const Field& f, const Field& g, const Field& h) {
    if (sym.arity != 3) throw std::invalid_argument("t3: symbol arity must be 3");
    if (!f.grid.same_as(g.grid) || !f.grid.same_as(h.grid))
        throw std::invalid_argument("t3: grid mismatch");

    if (sym.separable) {
        Field ff = apply_symbol(f, sym.separable->factors[0]);
        Field gg = apply_symbol(g, sym.separable->factors[1]);
        Field hh = apply_symbol(h, sym.separable->factors[2]);
        return multiply_padded({ff, gg, hh}, sym.separable->coef);
    }
    return from_natural_spectrum(
        f.grid, t3_core(sym, f.grid, natural_spectrum(f), natural_spectrum(g), natural_spectrum(h)));
}

std::string BoundAuditReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"lemma\":\"" << lemma << "\",\"per_k\":[";
    for (std::size_t i = 0; i < per_k.size(); ++i)
        os << (i ? "," : "") << "[" << per_k[i].first << "," << per_k[i].second << "]";
    os << "],\"bottom_quartile_max\":" << bottom_quartile_max
       << ",\"top_quartile_max\":" << top_quartile_max
       << ",\"no_growth\":" << (no_growth ? "true" : "false") << "}";
    return os.str();
}

namespace {

// Random natural-order spectrum supported exactly on the psi_k annulus, plus
// the physical field it represents.  The spectrum is handed to the summation
// cores directly so modes outside the annulus are exact zeros.
struct DyadicSample {
    std::vector<cplx> nat;
    Field field;
    double l2 = 0.0, linf = 0.0;
};

DyadicSample random_dyadic_sample(const Grid& g, int k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n = g.n();
    const long half = static_cast<long>(n) / 2;
    DyadicSample out;
    out.nat.assign(n, cplx(0.0, 0.0));
    std::vector<cplx> fft_order(n, cplx(0.0, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        const double w = psi_k(k, g.xi(s));
        if (w > 0.0) {
            const cplx z = w * cplx(gauss(rng), gauss(rng));
            fft_order[s] = z;
            out.nat[static_cast<std::size_t>(g.mode(s) + half)] = z;
        }
    }
    out.field = inverse(g, fft_order);
    out.l2 = norm_l2(out.field);
    out.linf = norm_linf(out.field);
    return out;
}

double l2_of_spectrum(const Grid& g, const std::vector<cplx>& nat) {
    double acc = 0.0;
    for (const auto& z : nat) acc += std::norm(z);
    return std::sqrt(acc / g.box_length());
}

void finalize_quartiles(BoundAuditReport& rep) {
    std::sort(rep.per_k.begin(), rep.per_k.end());
    const std::size_t nk = rep.per_k.size();
    if (nk == 0) return;
    const std::size_t q = std::max<std::size_t>(1, nk / 4);
    for (std::size_t i = 0; i < q; ++i)
        rep.bottom_quartile_max = std::max(rep.bottom_quartile_max, rep.per_k[i].second);
    for (std::size_t i = nk - q; i < nk; ++i)
        rep.top_quartile_max = std::max(rep.top_quartile_max, rep.per_k[i].second);
    rep.no_growth = rep.top_quartile_max <= 4.0 * rep.bottom_quartile_max;
}

void record_ratio(std::map<int, double>& table, int kscalar, double ratio) {
    auto it = table.find(kscalar);
    if (it == table.end()) table[kscalar] = ratio;
    else it->second = std::max(it->second, ratio);
}

}  // namespace

BoundAuditReport bound_audit(const std::string& lemma_id, const SymbolTables& tables,
                             const Grid& grid, int k_lo, int k_hi, std::size_t trials,
                             std::uint64_t seed, int gap) {
    if (trials == 0) throw std::invalid_argument("bound_audit: trials must be >= 1");
    if (grid.n() > 128) throw std::invalid_argument("bound_audit: direct summation needs n <= 128");
    std::mt19937_64 rng(seed);
    BoundAuditReport rep;
    rep.lemma = lemma_id;
    std::map<int, double> table;

    if (lemma_id == "bilinear-a") {
        for (int k1 = k_lo; k1 <= k_hi; ++k1)
            for (int k2 = k_lo; k2 <= k_hi; ++k2)
                for (std::size_t trial = 0; trial < trials; ++trial) {
                    auto f = random_dyadic_sample(grid, k1, rng);
                    auto g = random_dyadic_sample(grid, k2, rng);
                    if (f.l2 == 0.0 || g.linf == 0.0) continue;
                    for (int m1 : {1, -1})
                        for (int m2 : {1, -1}) {
                            auto sym = build_symbol("phi_inv_a", SignTuple::of(m1, m2), tables);
                            const double num = l2_of_spectrum(grid, t2_core(sym, grid, f.nat, g.nat));
                            const double ratio = num / (pow2(5 * std::min(k1, k2)) * f.l2 * g.linf);
                            record_ratio(table, std::min(k1, k2), ratio);
                        }
                }
    } else if (lemma_id == "trilin" || lemma_id == "trilin-good" || lemma_id == "trilin-b") {
        const bool good_only = lemma_id == "trilin-good";
        const bool b_only = lemma_id == "trilin-b";
        std::vector<SignTuple> tuples;
        if (good_only)
            tuples = {SignTuple::parse("+++"), SignTuple::parse("+--"), SignTuple::parse("---")};
        else if (b_only)
            for (int m1 : {1, -1})
                for (int m2 : {1, -1})
                    for (int m3 : {1, -1}) tuples.push_back(SignTuple::of(m1, m2, m3));
        else
            tuples = {SignTuple::parse("+++"), SignTuple::parse("++-"), SignTuple::parse("+--"),
                      SignTuple::parse("---")};
        // Representative (k1,k2,k3) shapes per med value; a full cube is too
        // expensive for direct triple summation.
        std::vector<std::array<int, 3>> shapes;
        for (int k = k_lo; k <= k_hi; ++k) {
            shapes.push_back({k, k, k});
            if (k - 2 >= k_lo) shapes.push_back({k - 2, k, k});
            if (k + 2 <= k_hi) shapes.push_back({k, k, k + 2});
        }
        for (const auto& sh : shapes) {
            const int k1 = sh[0], k2 = sh[1], k3 = sh[2];
            int arr[3] = {k1, k2, k3};
            std::sort(arr, arr + 3);
            const int med = arr[1];
            for (std::size_t trial = 0; trial < trials; ++trial) {
                auto f = random_dyadic_sample(grid, k1, rng);
                auto g = random_dyadic_sample(grid, k2, rng);
                auto h = random_dyadic_sample(grid, k3, rng);
                const double denom0 = f.l2 * g.linf * h.linf;
                if (denom0 == 0.0) continue;
                for (const auto& sg : tuples) {
                    const std::string fam = good_only ? "phi_inv_m" : (b_only ? "b" : "m");
                    auto sym = build_symbol(fam, sg, tables);
                    const double num = l2_of_spectrum(grid, t3_core(sym, grid, f.nat, g.nat, h.nat));
                    const double factor = b_only ? 1.0 : pow2((good_only ? 8 : 7) * med);
                    record_ratio(table, med, num / (factor * denom0));
                }
            }
        }
    } else if (lemma_id == "trilin-bad") {
        const SignTuple bad = SignTuple::parse("++-");
        bool any = false;
        for (int k3 = k_lo; k3 <= k_hi; ++k3)
            for (int k1 = k_lo; k1 <= k3 - gap; ++k1)
                for (int k2 = k_lo; k2 <= k3 - gap; ++k2) {
                    any = true;
                    for (std::size_t trial = 0; trial < trials; ++trial) {
                        auto f = random_dyadic_sample(grid, k1, rng);
                        auto g = random_dyadic_sample(grid, k2, rng);
                        auto h = random_dyadic_sample(grid, k3, rng);
                        const double denom0 = f.l2 * g.linf * h.linf;
                        if (denom0 == 0.0) continue;
                        auto sym = build_symbol("phi_inv_m", bad, tables, /*gap_restricted=*/true);
                        const double num = l2_of_spectrum(grid, t3_core(sym, grid, f.nat, g.nat, h.nat));
                        const int kmax12 = std::max(k1, k2);
                        record_ratio(table, kmax12, num / (pow2(7 * kmax12) * denom0));
                    }
                }
        if (!any)
            throw std::invalid_argument(
                "bound_audit: trilin-bad k-range violates the gap precondition max{k1,k2} <= k3 - gap");
    } else {
        throw std::invalid_argument("bound_audit: unknown lemma id \"" + lemma_id + "\"");
    }

    for (const auto& [k, r] : table) rep.per_k.emplace_back(k, r);
    finalize_quartiles(rep);
    return rep;
}

}  // namespace kg
