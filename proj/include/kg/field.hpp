#ifndef KG_FIELD_HPP
#define KG_FIELD_HPP

#include <complex>
#include <functional>
#include <vector>

#include "kg/grid.hpp"

namespace kg {

using cplx = std::complex<double>;

// Complex-valued function sampled on a Grid (physical-space representation).
// The universal carrier for u, U, V, projections and operator outputs.
struct Field {
    Grid grid;
    std::vector<cplx> v;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), v(g.n(), cplx(0.0, 0.0)) {}
    Field(const Grid& g, std::vector<cplx> values);

    std::size_t size() const { return v.size(); }
    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(cplx a);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx a, Field f);

Field conj(const Field& f);
Field real_part(const Field& f);
Field imag_part(const Field& f);

// Sample a function of x on the grid.
Field sample(const Grid& g, const std::function<cplx(double)>& fn);
Field sample_real(const Grid& g, const std::function<double(double)>& fn);

// dx-weighted norms on the lattice: l2 = sqrt(dx*sum|f|^2), l1 = dx*sum|f|.
double norm_l2(const Field& f);
double norm_l1(const Field& f);
double norm_linf(const Field& f);
bool all_finite(const Field& f);

}  // namespace kg

#endif
