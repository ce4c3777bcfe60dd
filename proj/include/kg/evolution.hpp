#ifndef KG_EVOLUTION_HPP
#define KG_EVOLUTION_HPP

#include <optional>
#include <string>

#include "kg/norms.hpp"
#include "kg/pseudoproduct.hpp"

namespace kg {

// A concrete nonlinearity F(u, dt u, dx u), quadratic at the origin, together
// with the coefficient tables of its pseudoproduct representation.
struct NonlinearitySpec {
    std::string tag = "u_squared";  // u_squared | dtu_sq_dxu | custom
    std::function<double(double, double, double)> eval;  // (u, ut, ux) -> F
    SymbolTables tables;

    static NonlinearitySpec u_squared();
    static NonlinearitySpec dtu_sq_dxu();
    static NonlinearitySpec none();  // F == 0 (linear flow)
    // Validates quadratic vanishing at 0 (value and gradient), throws otherwise.
    static NonlinearitySpec custom(std::function<double(double, double, double)> f,
                                   SymbolTables tables = {});

    bool is_zero() const { return !eval; }
};

enum class RunStatus { completed, blow_up, aliasing_abort };
std::string to_string(RunStatus s);

// Norm samples recorded along a trajectory.
struct NormSample {
    double t = 0.0;
    double hN = 0.0;
    double w1inf = 0.0;
    double z_alpha = 0.0;
    double sup_lambda_u_ut = 0.0;   // max(||Lambda u||_inf, ||dt u||_inf) = max(||Im U||_inf, ||Re U||_inf)
    double energy_rhs = 0.0;        // sum_k 2^{k(7+1/4)} ||P_k U||_inf * ||U||_{W^{1,inf}} * ||U||_{H^N}
};

struct IntegrateOptions {
    double aliasing_tol = 1e-6;
    std::size_t snapshot_stride = 1;   // record every this-many steps
    bool store_fields = true;          // keep U snapshots (needed by the audits)
    bool with_znorm = false;
    double znorm_alpha = 0.5;
    int norm_N = 8;
    // optional secondary threshold whose first crossing time is also recorded
    std::optional<double> secondary_threshold;
};

// Time evolution record of the half-Klein-Gordon flow.
struct Trajectory {
    Grid grid;
    double dt = 0.0;
    double blowup_threshold = 0.0;
    RunStatus status = RunStatus::completed;
    double t_end = 0.0;        // last recorded time
    double t_blowup = -1.0;    // threshold-crossing (or non-finite) time, if any
    double t_secondary = -1.0; // crossing time of the secondary threshold, if any
    double max_tail_fraction = 0.0;

    std::vector<double> times;       // snapshot lattice
    std::vector<Field> states;       // U snapshots (empty if not stored)
    std::vector<NormSample> norms;   // one entry per snapshot

    std::size_t index_of(double t) const;  // throws if t is off the lattice
};

// Right-hand side of (d/dt - i Lambda) U = N(U):  i Lambda U + F(u, dt u, dx u)
// with u = Lambda^{-1} (U - conj U)/(2i), dt u = (U + conj U)/2.  Products are
// evaluated on a zero-padded grid.  Non-finite inputs yield non-finite output
// (callers treat that as a blow-up signal, not an error).
Field rhs(const Field& U, double t, const NonlinearitySpec& F);

// Initial profile U(0) = u1 + i Lambda u0 from real Cauchy data.
Field half_kg_data(const Field& u0, const Field& u1);

// Fourth-order exponential integrator (the linear part is integrated exactly,
// the nonlinear part by the 4-stage exponential Runge-Kutta scheme), with
// 2/3-rule spectral truncation every step.  Early termination is reported in
// the status, never thrown.
Trajectory integrate(const Field& U0, const NonlinearitySpec& F, double t_end, double dt,
                     double blowup_threshold, const IntegrateOptions& opts = {});

// Profile V(t) = e^{-it Lambda} U(t) at a snapshot time.
Field profile_of(const Trajectory& traj, double t);

// L^2 norm of  Vhat(t) - Vhat(0) - int_0^t (e^{-is Lambda} N(U))^ ds  with the
// time integral evaluated by the trapezoid rule over the stored snapshots.
double duhamel_residual(const Trajectory& traj, double t, const NonlinearitySpec& F);

// Empirical constant for the integrated energy inequality: the smallest C
// with  ||U(t_{i+1})||_{H^N} - ||U(t_i)||_{H^N} <= C * int(energy_rhs)  on
// every recorded step.
struct EnergyAuditReport {
    double c_fit = 0.0;
    std::vector<double> margins;  // LHS increment - c_fit * RHS integral (all <= 0)
};
EnergyAuditReport energy_audit(const Trajectory& traj, int N);

}  // namespace kg

#endif
