#include "kg/config.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace kg {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& section,
                    std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed)
            if (it.key() == key) { ok = true; break; }
        if (!ok)
            throw std::invalid_argument("config: unknown key \"" + section + "." + it.key() + "\"");
    }
}

template <typename T>
void read_into(const json& obj, const char* key, T& dst) {
    if (obj.contains(key)) dst = obj.at(key).get<T>();
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

ConfigFile parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    reject_unknown(doc, "", {"grid", "dyadic", "norms", "evolution", "experiment"});

    ConfigFile cfg;

    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        reject_unknown(g, "grid", {"n", "box_length"});
        read_into(g, "n", cfg.grid.n);
        read_into(g, "box_length", cfg.grid.box_length);
        if (!is_power_of_two(cfg.grid.n) || cfg.grid.n < 8)
            throw std::invalid_argument("config: grid.n must be a power of two >= 8");
        if (!(cfg.grid.box_length > 0.0))
            throw std::invalid_argument("config: grid.box_length must be positive");
    }

    if (doc.contains("dyadic")) {
        const auto& d = doc.at("dyadic");
        reject_unknown(d, "dyadic", {"gap_constant", "j_max", "k_max"});
        read_into(d, "gap_constant", cfg.dyadic.gap_constant);
        read_into(d, "j_max", cfg.dyadic.j_max);
        read_into(d, "k_max", cfg.dyadic.k_max);
        if (cfg.dyadic.gap_constant < 1)
            throw std::invalid_argument("config: dyadic.gap_constant must be >= 1");
    }

    if (doc.contains("norms")) {
        const auto& n = doc.at("norms");
        reject_unknown(n, "norms", {"alpha", "N", "N1"});
        read_into(n, "alpha", cfg.norms.alpha);
        read_into(n, "N", cfg.norms.N);
        read_into(n, "N1", cfg.norms.N1);
        if (!(cfg.norms.alpha > 0.0) || cfg.norms.alpha > 0.5)
            throw std::invalid_argument("config: norms.alpha must lie in (0, 1/2]");
        if (cfg.norms.N < 0) throw std::invalid_argument("config: norms.N must be >= 0");
    }
    if (cfg.norms.N1 != 12)
        std::cerr << "==================================================================\n"
                  << "WARNING: norms.N1 = " << cfg.norms.N1 << " differs from the reference\n"
                  << "value 12. Z-norm values computed with this weight are NOT comparable\n"
                  << "with the standard definition; downstream thresholds may be invalid.\n"
                  << "==================================================================\n";

    if (doc.contains("evolution")) {
        const auto& e = doc.at("evolution");
        reject_unknown(e, "evolution",
                       {"F", "epsilon", "dt", "horizon", "blowup_threshold", "aliasing_tol",
                        "snapshot_stride"});
        read_into(e, "F", cfg.evolution.F);
        read_into(e, "epsilon", cfg.evolution.epsilon);
        read_into(e, "dt", cfg.evolution.dt);
        read_into(e, "horizon", cfg.evolution.horizon);
        read_into(e, "blowup_threshold", cfg.evolution.blowup_threshold);
        read_into(e, "aliasing_tol", cfg.evolution.aliasing_tol);
        read_into(e, "snapshot_stride", cfg.evolution.snapshot_stride);
        if (cfg.evolution.F != "u_squared" && cfg.evolution.F != "dtu_sq_dxu" &&
            cfg.evolution.F != "none")
            throw std::invalid_argument("config: evolution.F must be u_squared, dtu_sq_dxu or none");
        if (cfg.evolution.epsilon < 0.0)
            throw std::invalid_argument("config: evolution.epsilon must be >= 0");
        if (!(cfg.evolution.dt > 0.0)) throw std::invalid_argument("config: evolution.dt must be > 0");
        if (!(cfg.evolution.horizon > 0.0))
            throw std::invalid_argument("config: evolution.horizon must be > 0");
        if (cfg.evolution.blowup_threshold < 0.0)
            throw std::invalid_argument("config: evolution.blowup_threshold must be >= 0");
        if (!(cfg.evolution.aliasing_tol > 0.0))
            throw std::invalid_argument("config: evolution.aliasing_tol must be > 0");
        if (cfg.evolution.snapshot_stride == 0)
            throw std::invalid_argument("config: evolution.snapshot_stride must be >= 1");
    }

    if (doc.contains("experiment")) {
        const auto& x = doc.at("experiment");
        reject_unknown(x, "experiment",
                       {"tag", "eps_list", "fit_window", "seed", "output_dir", "r_max",
                        "eps_assert_below", "time_budget"});
        read_into(x, "tag", cfg.experiment.tag);
        if (x.contains("eps_list"))
            cfg.experiment.eps_list = x.at("eps_list").get<std::vector<double>>();
        if (x.contains("fit_window")) {
            const auto& w = x.at("fit_window");
            if (!w.is_array() || w.size() != 2)
                throw std::invalid_argument("config: experiment.fit_window must be [lo, hi]");
            cfg.experiment.fit_lo = w.at(0).get<double>();
            cfg.experiment.fit_hi = w.at(1).get<double>();
        }
        read_into(x, "seed", cfg.experiment.seed);
        read_into(x, "output_dir", cfg.experiment.output_dir);
        read_into(x, "r_max", cfg.experiment.r_max);
        read_into(x, "eps_assert_below", cfg.experiment.eps_assert_below);
        read_into(x, "time_budget", cfg.experiment.time_budget);

        const bool known = cfg.experiment.tag == "simulate" || cfg.experiment.tag == "dispersion" ||
                           cfg.experiment.tag == "nonlinear_decay" || cfg.experiment.tag == "znorm" ||
                           cfg.experiment.tag == "lifespan";
        if (!known)
            throw std::invalid_argument("config: experiment.tag \"" + cfg.experiment.tag +
                                        "\" is not one of simulate|dispersion|nonlinear_decay|znorm|lifespan");
        for (std::size_t i = 0; i < cfg.experiment.eps_list.size(); ++i) {
            if (!(cfg.experiment.eps_list[i] > 0.0))
                throw std::invalid_argument("config: experiment.eps_list entries must be positive");
            if (i > 0 && !(cfg.experiment.eps_list[i] < cfg.experiment.eps_list[i - 1]))
                throw std::invalid_argument("config: experiment.eps_list must be strictly decreasing");
        }
        if (!(cfg.experiment.fit_lo >= 0.0) || !(cfg.experiment.fit_hi > cfg.experiment.fit_lo))
            throw std::invalid_argument("config: experiment.fit_window must satisfy 0 <= lo < hi");
        if (cfg.experiment.fit_hi > cfg.evolution.horizon)
            throw std::invalid_argument("config: experiment.fit_window must lie within evolution.horizon");
    }

    return cfg;
}

ConfigFile parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string ConfigFile::to_json() const {
    json doc;
    doc["grid"] = {{"n", grid.n}, {"box_length", grid.box_length}};
    doc["dyadic"] = {{"gap_constant", dyadic.gap_constant},
                     {"j_max", dyadic.j_max},
                     {"k_max", dyadic.k_max}};
    doc["norms"] = {{"alpha", norms.alpha}, {"N", norms.N}, {"N1", norms.N1}};
    doc["evolution"] = {{"F", evolution.F},
                        {"epsilon", evolution.epsilon},
                        {"dt", evolution.dt},
                        {"horizon", evolution.horizon},
                        {"blowup_threshold", evolution.blowup_threshold},
                        {"aliasing_tol", evolution.aliasing_tol},
                        {"snapshot_stride", evolution.snapshot_stride}};
    doc["experiment"] = {{"tag", experiment.tag},
                         {"eps_list", experiment.eps_list},
                         {"fit_window", {experiment.fit_lo, experiment.fit_hi}},
                         {"seed", experiment.seed},
                         {"output_dir", experiment.output_dir},
                         {"r_max", experiment.r_max},
                         {"eps_assert_below", experiment.eps_assert_below},
                         {"time_budget", experiment.time_budget}};
    return doc.dump(2);
}

double resolved_blowup_threshold(const ConfigFile& cfg, double sup0) {
    if (cfg.evolution.blowup_threshold > 0.0) return cfg.evolution.blowup_threshold;
    const double eps = cfg.evolution.epsilon > 0.0 ? cfg.evolution.epsilon : 1.0;
    return 10.0 * std::max(1.0, sup0 / eps);
}

}  // namespace kg
