#include "acim/config.hpp"

#include <fstream>

#include "acim/rng.hpp"

namespace acim {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

void read_window(const json& j, const char* key, long& lo, long& hi) {
    if (j.contains(key)) {
        auto w = j.at(key);
        if (!w.is_array() || w.size() != 2) fail(ErrorCode::BadConfig, std::string(key) + " must be [lo, hi]");
        lo = w[0].get<long>();
        hi = w[1].get<long>();
    }
}

}  // namespace

std::string ExperimentConfig::config_hash() const {
    uint64_t h = fnv1a64(raw.dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    cfg.raw = j;
    if (!j.is_object()) fail(ErrorCode::BadConfig, "config root must be an object");

    if (j.contains("map")) {
        const json& m = j.at("map");
        std::string id;
        if (m.contains("example_id")) {
            if (m.at("example_id").is_number_integer())
                id = std::to_string(m.at("example_id").get<int>());
            else
                id = m.at("example_id").get<std::string>();
        } else {
            fail(ErrorCode::BadConfig, "map.example_id is required");
        }
        cfg.map = default_spec(id);
        read_field(m, "r0", cfg.map.r0);
        read_field(m, "region_radius", cfg.map.region_radius);
        read_field(m, "surrogate_expansion", cfg.map.surrogate_expansion);
        read_field(m, "gamma", cfg.map.gamma);
    }

    if (j.contains("seed")) {
        cfg.seed = j.at("seed").get<uint64_t>();
        cfg.seed_present = true;
    }
    read_field(j, "out", cfg.out_dir);

    if (j.contains("induction")) {
        const json& b = j.at("induction");
        InductionConfig ic;
        read_field(b, "n_max", ic.n_max);
        read_field(b, "n_samples", ic.n_samples);
        read_field(b, "component", ic.component);
        read_field(b, "margin", ic.margin);
        read_window(b, "detect_window", ic.detect_lo, ic.detect_hi);
        read_window(b, "asymptotic_window", ic.asymptotic_lo, ic.asymptotic_hi);
        cfg.induction = ic;
    }
    if (j.contains("transfer")) {
        const json& b = j.at("transfer");
        TransferConfig tc;
        read_field(b, "resolution", tc.resolution);
        read_field(b, "samples_per_cell", tc.samples_per_cell);
        read_field(b, "tol", tc.tol);
        read_field(b, "max_iter", tc.max_iter);
        read_field(b, "n_levels", tc.n_levels);
        read_field(b, "jitter", tc.jitter);
        cfg.transfer = tc;
    }
    if (j.contains("quasi_holder")) {
        const json& b = j.at("quasi_holder");
        QuasiHolderBlock qb;
        read_field(b, "alpha", qb.alpha);
        read_field(b, "eps0", qb.eps0);
        read_field(b, "k_max", qb.k_max);
        read_field(b, "n_indicators", qb.n_indicators);
        read_field(b, "n_trig", qb.n_trig);
        read_field(b, "iterate_depth", qb.iterate_depth);
        cfg.quasi_holder = qb;
    }
    if (j.contains("asymptotics")) {
        const json& b = j.at("asymptotics");
        AsymptoticsConfig ac;
        read_field(b, "orbit_length", ac.orbit_length);
        read_window(b, "fit_window", ac.window_lo, ac.window_hi);
        cfg.asymptotics = ac;
    }
    if (j.contains("audit")) {
        const json& b = j.at("audit");
        AuditOptions ao;
        read_field(b, "grid", ao.grid_per_axis);
        read_field(b, "probe_radius", ao.probe_radius);
        read_field(b, "probe_samples", ao.probe_samples);
        read_field(b, "n_centers", ao.n_centers);
        read_field(b, "samples_per_center", ao.samples_per_center);
        read_field(b, "alpha", ao.alpha);
        read_field(b, "n_pairs", ao.n_pairs);
        cfg.audit = ao;
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::BadConfig, "cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(ErrorCode::BadConfig, std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

void validate_for_command(const ExperimentConfig& cfg, const std::string& command) {
    if (!cfg.seed_present) fail(ErrorCode::BadConfig, "seed is mandatory");
    if (command == "replicate-paper") return;
    if (cfg.raw.find("map") == cfg.raw.end()) fail(ErrorCode::BadConfig, "map block is required");
    auto need = [&](bool present, const char* block) {
        if (!present) fail(ErrorCode::BadConfig, std::string(command) + " requires the " + block + " block");
    };
    if (command == "classify") {
        need(cfg.induction.has_value(), "induction");
        need(cfg.transfer.has_value(), "transfer");
    } else if (command == "density") {
        need(cfg.transfer.has_value(), "transfer");
    } else if (command == "induce-stats") {
        need(cfg.induction.has_value(), "induction");
    } else if (command == "asymptotics") {
        need(cfg.asymptotics.has_value(), "asymptotics");
    } else if (command == "seminorm") {
        need(cfg.transfer.has_value(), "transfer");
        need(cfg.quasi_holder.has_value(), "quasi_holder");
    } else if (command == "audit") {
        need(cfg.audit.has_value(), "audit");
    } else {
        fail(ErrorCode::BadConfig, "unknown command '" + command + "'");
    }
}

}  // namespace acim
