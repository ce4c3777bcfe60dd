#ifndef KG_EXPERIMENTS_HPP
#define KG_EXPERIMENTS_HPP

#include "kg/config.hpp"
#include "kg/evolution.hpp"

namespace kg {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r2 = 0.0;
    double residual_max = 0.0;
    std::size_t points = 0;
    bool valid = false;
    std::string note;
};

// Least-squares line through (x_i, y_i).
FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Gaussian seed profiles (before scaling by epsilon):
//   u0 profile  e^{-x^2},   u1 profile  d/dx e^{-x^2}
// chosen so that sigma = int u0' u1 dx > 0 (verified at runtime, not assumed).
Field seed_u0_profile(const Grid& g);
Field seed_u1_profile(const Grid& g);
double seed_sigma(const Grid& g);            // int u0' u1 dx (rectangle rule)
double seed_support_radius(const Grid& g);   // outermost |x| with profile above 1e-14

// --- Linear dispersive decay ------------------------------------------------
struct DispersionKResult {
    int k = 0;
    FitResult fit;          // slope of log ||P_k e^{itL} f||_inf vs log(1+t)
    double constant = 0.0;  // sup_t ||.||_inf (1+t)^{1/2} / (2^{3k/2} ||P_k f||_{L^1})
    bool wrap_aborted = false;
};
struct DispersionReport {
    // slope of the full evolved field e^{itL} f; the annulus-filtered packets
    // reach the -1/2 asymptotics only at t ~ 2^{3k} x O(100), so the full
    // field carries the headline decay exponent at desk scale
    FitResult full_fit;
    double sup_t0 = 0.0;  // sup at t = 0 of the full field
    std::vector<DispersionKResult> per_k;
};
DispersionReport dispersion_decay(const ConfigFile& cfg, const std::vector<int>& ks = {0, 1, 2, 3});

// --- Nonlinear sup-norm decay -------------------------------------------------
struct DecayResult {
    double epsilon = 0.0;
    RunStatus status = RunStatus::completed;
    FitResult fit;        // slope of log ||(Lambda u, dt u)||_inf vs log(1+t)
    double c_eps = 0.0;   // max_t sup * (1+t)^alpha / epsilon
};
std::vector<DecayResult> nonlinear_decay(const ConfigFile& cfg, const std::vector<double>& eps_list);

// --- Z-norm tracking (the bootstrap quantity) --------------------------------
struct ZnormTrackReport {
    double epsilon = 0.0;
    RunStatus status = RunStatus::completed;
    double initial = 0.0;
    double max_ratio = 0.0;
    bool within_bound = true;  // max_ratio <= r_max whenever epsilon <= eps_assert_below
    std::vector<std::pair<double, double>> series;  // (t, Z_alpha(V(t)))
};
ZnormTrackReport znorm_tracking(const ConfigFile& cfg);

// --- Lifespan scan ------------------------------------------------------------
struct LifespanEntry {
    double epsilon = 0.0;
    double threshold = 0.0;
    double t_star = -1.0;       // threshold-crossing time; < 0 if censored
    double t_half = -1.0;       // crossing time of threshold/2 (sensitivity probe)
    bool censored = false;
    double censor_time = 0.0;   // budget or abort time when censored
    double upper_bound = 0.0;   // R (e^{2/(sigma eps^2)} - 1) with measured sigma, R
    RunStatus status = RunStatus::completed;
};
struct LifespanReport {
    std::vector<LifespanEntry> entries;
    double sigma = 0.0;
    double support_radius = 0.0;
    FitResult fit;  // log t* vs eps^{-2} over uncensored entries
    bool monotone = false;
    bool bound_respected = false;
    std::string to_json() const;
};
// persist_dir, when non-empty, receives one eps-<value>/ subdirectory per run
// with the trajectory's norms.csv and status.json.
LifespanReport lifespan_scan(const ConfigFile& cfg, const std::string& persist_dir = "");

// --- Persistence ---------------------------------------------------------------
// Creates <output_dir>/<tag>-<confighash>; appends a timestamp suffix instead of
// overwriting an existing directory.  Returns the directory path.
std::string make_run_dir(const ConfigFile& cfg, const std::string& tag);
void write_norms_csv(const std::string& path, const Trajectory& traj);
void write_status_json(const std::string& path, const Trajectory& traj);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace kg

#endif
