#ifndef KG_CONFIG_HPP
#define KG_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace kg {

// Fully resolved run configuration.  parse_config validates a JSON document
// against this schema (unknown keys are rejected with field-level messages),
// fills defaults, and the echo re-parses to an identical config.
struct ConfigFile {
    struct GridSection {
        std::size_t n = 4096;
        double box_length = 256.0 * 3.14159265358979323846;
    } grid;

    struct DyadicSection {
        int gap_constant = 5;
        int j_max = -2;  // -2 = derive from the grid
        int k_max = -2;
    } dyadic;

    struct NormsSection {
        double alpha = 0.5;
        int N = 8;
        int N1 = 12;
    } norms;

    struct EvolutionSection {
        std::string F = "u_squared";  // u_squared | dtu_sq_dxu | none
        double epsilon = 0.05;
        double dt = 0.05;
        double horizon = 100.0;
        double blowup_threshold = 0.0;  // 0 = derive: 10 * max(1, sup0/epsilon)
        double aliasing_tol = 1e-6;
        std::size_t snapshot_stride = 10;
    } evolution;

    struct ExperimentSection {
        std::string tag = "simulate";  // simulate | dispersion | nonlinear_decay | znorm | lifespan
        std::vector<double> eps_list = {0.8, 0.7, 0.6, 0.5, 0.45, 0.4};
        double fit_lo = 5.0;
        double fit_hi = 50.0;
        std::uint64_t seed = 20240801;
        std::string output_dir = "runs";
        double r_max = 4.0;          // Z-norm growth bound asserted by znorm tracking
        double eps_assert_below = 0.1;
        double time_budget = 6000.0; // per-epsilon horizon for the lifespan scan
    } experiment;

    std::string to_json() const;
};

// Parse and validate a JSON document (by content).  Throws std::invalid_argument
// with a field-level message on malformed input or constraint violations.
// A non-default norms.N1 triggers a prominent warning on stderr: the Z-norm
// weights are then not comparable with the reference value 12.
ConfigFile parse_config_text(const std::string& json_text);
// Same, reading the file at `path`.
ConfigFile parse_config(const std::string& path);

// Derived values.
double resolved_blowup_threshold(const ConfigFile& cfg, double sup0);

}  // namespace kg

#endif
