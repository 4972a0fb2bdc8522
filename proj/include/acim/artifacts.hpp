#pragma once

#include <string>

#include <json.hpp>

#include "acim/assumption_audit.hpp"
#include "acim/config.hpp"
#include "acim/induction.hpp"
#include "acim/quasi_holder.hpp"
#include "acim/transfer.hpp"

namespace acim {

// Fixed-format double for byte-identical CSV artifacts.
std::string format_double(double v);

class ArtifactWriter {
  public:
    ArtifactWriter(std::string dir, std::string config_hash, uint64_t seed);

    std::string path(const std::string& name) const;
    void write_text(const std::string& name, const std::string& content) const;
    void write_json(const std::string& name, nlohmann::json j) const;
    std::string header_comment() const;  // "# config_hash=... \n# seed=...\n"

    const std::string& dir() const { return dir_; }
    const std::string& config_hash() const { return hash_; }
    uint64_t seed() const { return seed_; }

  private:
    std::string dir_;
    std::string hash_;
    uint64_t seed_;
};

void write_tails_csv(const ArtifactWriter& w, const TailProfile& profile);
void write_density_csv(const ArtifactWriter& w, const GridDensity& density);
void write_transfer_csv(const ArtifactWriter& w, const TransferMatrix& matrix);
void write_classification_json(const ArtifactWriter& w, const Classification& c, int component);
void write_ly_json(const ArtifactWriter& w, const LYReport& rep, double eta_threshold_note);
void write_audit_json(const ArtifactWriter& w, const AuditReport& rep);
void write_errors_json(const ArtifactWriter& w, const std::string& command, const std::string& code,
                       const std::string& what);

// Runs one CLI command end to end. Returns 0 on success; numeric failures
// write errors.json and return 3. Configuration problems throw BadConfig.
int run_command(const ExperimentConfig& cfg, const std::string& command);

}  // namespace acim
