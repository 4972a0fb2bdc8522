#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "acim/assumption_audit.hpp"
#include "acim/example_maps.hpp"
#include "acim/transfer.hpp"

namespace acim {

struct InductionConfig {
    long n_max = 100000;
    long n_samples = 1000000;
    int component = 0;
    long detect_lo = 8, detect_hi = 100;
    long asymptotic_lo = 100, asymptotic_hi = 1000;
    double margin = 0.15;
};

struct TransferConfig {
    int resolution = 256;
    long samples_per_cell = 1024;
    double tol = 1e-12;
    long max_iter = 20000;
    long n_levels = 4000;
    double jitter = 1.0;
};

struct QuasiHolderBlock {
    double alpha = 0.5;
    double eps0 = 0.1;
    int k_max = 6;
    int n_indicators = 64;
    int n_trig = 16;
    int iterate_depth = 20;
};

struct AsymptoticsConfig {
    long orbit_length = 10000;
    long window_lo = 1000, window_hi = 10000;
};

struct ExperimentConfig {
    ExampleSpec map;
    uint64_t seed = 0;
    bool seed_present = false;
    std::string out_dir = "out";
    std::optional<InductionConfig> induction;
    std::optional<TransferConfig> transfer;
    std::optional<QuasiHolderBlock> quasi_holder;
    std::optional<AsymptoticsConfig> asymptotics;
    std::optional<AuditOptions> audit;
    nlohmann::json raw;

    std::string config_hash() const;  // FNV-1a of the canonical dump
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

// Throws BadConfig listing what the command is missing.
void validate_for_command(const ExperimentConfig& cfg, const std::string& command);

}  // namespace acim
