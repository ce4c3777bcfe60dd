#ifndef KG_GRID_HPP
#define KG_GRID_HPP

#include <cstddef>
#include <memory>
#include <vector>

namespace kg {

// Periodic spatial/frequency lattice on the box [-L/2, L/2).
//
// Sample points   x_p = -L/2 + p*dx,     p = 0..n-1, dx = L/n
// Frequencies     xi_m = 2*pi*m/L,       m = -n/2 .. n/2-1
//
// n must be a power of two (n >= 8).  Copies are cheap: the lattice data
// is shared, a Grid behaves like a value.
class Grid {
  public:
    Grid() = default;
    Grid(std::size_t n, double box_length);

    std::size_t n() const { return data_->n; }
    double box_length() const { return data_->box_length; }
    double dx() const { return data_->dx; }
    double dxi() const { return data_->dxi; }
    double xi_max() const { return data_->dxi * static_cast<double>(data_->n / 2); }

    double x(std::size_t p) const { return -0.5 * data_->box_length + data_->dx * static_cast<double>(p); }

    // Signed mode number for FFT storage slot s: m = s for s < n/2, s - n otherwise.
    long mode(std::size_t s) const {
        return s < data_->n / 2 ? static_cast<long>(s) : static_cast<long>(s) - static_cast<long>(data_->n);
    }
    // Frequency xi_m for FFT storage slot s.
    double xi(std::size_t s) const { return data_->dxi * static_cast<double>(mode(s)); }

    // Frequencies in increasing order, m = -n/2 .. n/2-1.
    const std::vector<double>& frequencies() const { return data_->freq; }

    bool same_as(const Grid& other) const { return data_ == other.data_ || (n() == other.n() && box_length() == other.box_length()); }

  private:
    struct Data {
        std::size_t n = 0;
        double box_length = 0.0;
        double dx = 0.0;
        double dxi = 0.0;
        std::vector<double> freq;
    };
    std::shared_ptr<const Data> data_;
};

Grid make_grid(std::size_t n, double box_length);

}  // namespace kg

#endif
