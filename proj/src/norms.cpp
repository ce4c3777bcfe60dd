#include "kg/norms.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kg {

std::string NormReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"kind\":\"" << kind << "\",\"value\":" << value << ",\"alpha\":" << alpha
       << ",\"beta\":" << beta << ",\"N\":" << N << ",\"j_max\":" << j_max
       << ",\"k_max\":" << k_max << ",\"contributions\":[";
    for (std::size_t i = 0; i < contributions.size(); ++i) {
        const auto& [j, k, c] = contributions[i];
        os << (i ? "," : "") << "[" << j << "," << k << "," << c << "]";
    }
    os << "]}";
    return os.str();
}

NormReport znorm(const Field& f, double alpha, int j_max, int k_max, int N1) {
    if (!(alpha > 0.0) || alpha > 0.5)
        throw std::invalid_argument("znorm: alpha must lie in (0, 1/2]");
    NormReport rep;
    rep.kind = "z_alpha";
    rep.alpha = alpha;
    rep.N = N1;
    rep.j_max = j_max;
    rep.k_max = k_max;
    for (int k = -1; k <= k_max; ++k) {
        Field pk = project_freq(f, k);
        for (int j = -1; j <= j_max; ++j) {
            Field qjpk = localize_phys(pk, j);
            const double w = std::exp2(j * alpha + static_cast<double>(N1) * k);
            const double c = w * norm_l2(qjpk);
            rep.contributions.emplace_back(j, k, c);
            rep.value += c;
        }
    }
    return rep;
}

NormReport znorm(const Field& f, double alpha) {
    return znorm(f, alpha, default_j_max(f.grid), default_k_max(f.grid));
}

double sobolev_norm(const Field& f, int N) {
    if (N < 0) throw std::invalid_argument("sobolev_norm: N must be >= 0");
    auto fhat = forward(f);
    double s = 0.0;
    for (std::size_t i = 0; i < fhat.size(); ++i) {
        const double xi = f.grid.xi(i);
        s += std::pow(1.0 + xi * xi, N) * std::norm(fhat[i]);
    }
    return std::sqrt(s / f.grid.box_length());
}

double winf_norm(const Field& f, int N) {
    if (N < 0) throw std::invalid_argument("winf_norm: N must be >= 0");
    double best = norm_linf(f);
    for (int d = 1; d <= N; ++d) {
        Field df = apply_symbol(f, [d](double xi) { return std::pow(cplx(0.0, xi), d); });
        best = std::max(best, norm_linf(df));
    }
    return best;
}

double weighted_norm(const Field& f, double beta, double s) {
    if (beta < 0.0 || s < 0.0) throw std::invalid_argument("weighted_norm: beta, s must be >= 0");
    Field ls = apply_symbol(f, [s](double xi) { return cplx(std::pow(1.0 + xi * xi, 0.5 * s), 0.0); });
    double acc = 0.0;
    for (std::size_t p = 0; p < ls.size(); ++p) {
        const double x = ls.grid.x(p);
        const double w = std::pow(1.0 + x * x, beta);
        acc += w * std::norm(ls.v[p]);
    }
    return std::sqrt(ls.grid.dx() * acc);
}

WeightAuditReport znorm_weight_audit(const std::vector<Field>& family, double alpha, double beta) {
    WeightAuditReport rep;
    rep.alpha = alpha;
    rep.beta = beta;
    bool any = false;
    for (const auto& f : family) {
        const double denom = weighted_norm(f, beta, 14.0);
        if (denom <= 0.0) continue;
        any = true;
        const double r = znorm(f, alpha).value / denom;
        rep.ratios.push_back(r);
        rep.fitted_constant = std::max(rep.fitted_constant, r);
    }
    if (!any) throw std::invalid_argument("znorm_weight_audit: degenerate family (all zero fields)");
    return rep;
}

}  // namespace kg
