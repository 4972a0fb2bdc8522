#include "acim/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "acim/asymptotics.hpp"

namespace acim {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ArtifactWriter::ArtifactWriter(std::string dir, std::string config_hash, uint64_t seed)
    : dir_(std::move(dir)), hash_(std::move(config_hash)), seed_(seed) {
    std::filesystem::create_directories(dir_);
}

std::string ArtifactWriter::path(const std::string& name) const { return dir_ + "/" + name; }

void ArtifactWriter::write_text(const std::string& name, const std::string& content) const {
    std::ofstream out(path(name), std::ios::binary);
    if (!out) fail(ErrorCode::BadConfig, "cannot write artifact " + path(name));
    out << content;
}

void ArtifactWriter::write_json(const std::string& name, json j) const {
    j["config_hash"] = hash_;
    j["seed"] = seed_;
    write_text(name, j.dump(2) + "\n");
}

std::string ArtifactWriter::header_comment() const {
    std::ostringstream os;
    os << "# config_hash=" << hash_ << "\n# seed=" << seed_ << "\n";
    return os.str();
}

void write_tails_csv(const ArtifactWriter& w, const TailProfile& profile) {
    std::ostringstream os;
    os << w.header_comment();
    os << "# region_volume=" << format_double(profile.region_volume)
       << " residual_volume=" << format_double(profile.residual_volume)
       << " overflow_count=" << profile.overflow_count
       << " boundary_rejections=" << profile.boundary_rejections
       << " component=" << profile.component << "\n";
    os << "n,level_volume,tail_volume,stderr\n";
    long last_positive = 0;
    for (long n = 1; n <= profile.n_max; ++n)
        if (profile.tail_volumes[static_cast<size_t>(n - 1)] > 0.0) last_positive = n;
    for (long n = 1; n <= last_positive; ++n) {
        os << n << ',' << format_double(profile.level_volumes[static_cast<size_t>(n - 1)]) << ','
           << format_double(profile.tail_volumes[static_cast<size_t>(n - 1)]) << ','
           << format_double(profile.level_stderr[static_cast<size_t>(n - 1)]) << "\n";
    }
    w.write_text("tails.csv", os.str());
}

void write_density_csv(const ArtifactWriter& w, const GridDensity& density) {
    const UlamPartition& p = *density.part;
    std::ostringstream os;
    os << w.header_comment();
    os << "# resolution=" << p.resolution << " cell_volume=" << format_double(p.cell_volume)
       << " straddle_mass=" << format_double(p.straddle_mass()) << "\n";
    os << "cell";
    for (int a = 0; a < p.dim; ++a) os << ",x" << a;
    os << ",h,in_region\n";
    for (long c = 0; c < p.cell_count(); ++c) {
        Pt q = p.center(c);
        os << c;
        for (int a = 0; a < p.dim; ++a) os << ',' << format_double(q[a]);
        os << ',' << format_double(density.values[static_cast<size_t>(c)]) << ','
           << static_cast<int>(p.in_region[static_cast<size_t>(c)]) << "\n";
    }
    w.write_text("density.csv", os.str());
}

void write_transfer_csv(const ArtifactWriter& w, const TransferMatrix& m) {
    std::ostringstream os;
    os << w.header_comment();
    json header{{"resolution", m.part->resolution},
                {"seed", m.seed},
                {"samples_per_cell", m.samples_per_cell},
                {"rows", m.row_count()},
                {"starved_rows", m.starved_rows.size()},
                {"overflow_samples", m.overflow_samples},
                {"boundary_rejections", m.boundary_rejections},
                {"straddle_mass", m.part->straddle_mass()}};
    os << "# " << header.dump() << "\n";
    os << "row,col,value\n";
    for (long r = 0; r < m.row_count(); ++r)
        for (int64_t k = m.row_ptr[static_cast<size_t>(r)]; k < m.row_ptr[static_cast<size_t>(r) + 1]; ++k)
            os << r << ',' << m.col[static_cast<size_t>(k)] << ','
               << format_double(m.val[static_cast<size_t>(k)]) << "\n";
    w.write_text("transfer.csv", os.str());
}

void write_classification_json(const ArtifactWriter& w, const Classification& c, int component) {
    json j;
    j["verdict"] = c.verdict;
    j["component"] = component;
    j["rho_hat"] = c.rho_hat;
    j["rho_stderr"] = c.rho_stderr;
    j["margin"] = c.margin;
    j["detect_window"] = {c.detect_fit.window_lo, c.detect_fit.window_hi};
    j["asymptotic_rho_hat"] = c.asymptotic_fit.rho_hat;
    j["asymptotic_window"] = {c.asymptotic_fit.window_lo, c.asymptotic_fit.window_hi};
    j["hhat_sup"] = c.hhat_sup;
    j["kprime"] = c.kprime;
    j["extended_mass_bound"] = c.extended_mass_bound;
    j["residual_volume"] = c.residual_volume;
    w.write_json("classification.json", j);
}

void write_ly_json(const ArtifactWriter& w, const LYReport& rep, double eta_threshold_note) {
    json j;
    j["eta_hat"] = rep.eta_hat;
    j["D_hat"] = rep.d_hat;
    j["family"] = rep.family;
    j["eta_below_one"] = rep.eta_hat < eta_threshold_note;
    json rows = json::array();
    for (const LYRow& r : rep.rows)
        rows.push_back({{"f_id", r.id}, {"f_alpha", r.f_alpha}, {"f_l1", r.f_l1}, {"pf_alpha", r.pf_alpha}});
    j["rows"] = rows;
    w.write_json("ly_report.json", j);
}

void write_audit_json(const ArtifactWriter& w, const AuditReport& rep) {
    json j;
    j["s_hat"] = rep.s_hat;
    j["lambda_hat"] = rep.lambda.lambda_hat;
    j["condition_value"] = rep.lambda.condition_value;
    j["geometric_term"] = rep.lambda.geometric_term;
    j["overlap_term"] = rep.lambda.overlap_term;
    j["c_hat"] = rep.c_hat;
    j["alpha"] = rep.alpha;
    j["verdict_condition_below_one"] = rep.verdict;
    j["remark_floor"] = rep.remark_floor;
    j["grid_points_used"] = rep.expansion.grid_points_used;
    j["skipped_in_region"] = rep.expansion.skipped_in_region;
    j["skipped_near_neutral"] = rep.expansion.skipped_near_neutral;
    j["skipped_on_boundary"] = rep.expansion.skipped_on_boundary;
    json table = json::array();
    for (const OverlapRow& row : rep.g_table)
        table.push_back({{"eps", row.eps}, {"eps0", row.eps0}, {"G_hat", row.g_hat}});
    j["G_table"] = table;
    json worst = json::array();
    for (const Pt& p : rep.expansion.worst_points) worst.push_back({p[0], p[1], p[2]});
    j["worst_points"] = worst;
    j["not_machine_checkable"] = {"N_s", "N(eps)", "J", "b", "C_xi", "I"};
    w.write_json("audit.json", j);
}

void write_errors_json(const ArtifactWriter& w, const std::string& command, const std::string& code,
                       const std::string& what) {
    json j;
    j["command"] = command;
    j["error"] = code;
    j["what"] = what;
    w.write_json("errors.json", j);
}

namespace {

void run_classify(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    PiecewiseMap map = make_example(cfg.map);
    const InductionConfig& ic = *cfg.induction;
    TailProfile prof = level_volumes(map, ic.n_max, ic.n_samples, cfg.seed, ic.component);
    write_tails_csv(w, prof);

    const TransferConfig& tc = *cfg.transfer;
    UlamPartition part = build_partition(map, map.domain, tc.resolution);
    TransferOptions topt;
    topt.jitter = tc.jitter;
    TransferMatrix matrix = build_transfer(map, part, tc.samples_per_cell, cfg.seed, topt);
    DensityResult inv = invariant_density(matrix, tc.tol, tc.max_iter);

    ClassifyOptions copt;
    copt.margin = ic.margin;
    copt.detect_lo = ic.detect_lo;
    copt.detect_hi = ic.detect_hi;
    copt.asymptotic_lo = ic.asymptotic_lo;
    copt.asymptotic_hi = ic.asymptotic_hi;
    Classification cls = classify_measure(map, prof, &inv.density, copt);
    write_classification_json(w, cls, ic.component);
}

void run_density(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    PiecewiseMap map = make_example(cfg.map);
    const TransferConfig& tc = *cfg.transfer;
    UlamPartition part = build_partition(map, map.domain, tc.resolution);
    TransferOptions topt;
    topt.jitter = tc.jitter;
    TransferMatrix matrix = build_transfer(map, part, tc.samples_per_cell, cfg.seed, topt);
    write_transfer_csv(w, matrix);
    DensityResult inv = invariant_density(matrix, tc.tol, tc.max_iter);
    if (!inv.converged)
        fail(ErrorCode::BadConfig, "power iteration did not converge; residual " +
                                       format_double(inv.residual));
    if (tc.n_levels > 0 && map.dim <= 2) {
        ExtensionResult ext = extend_density(map, inv.density, tc.n_levels);
        write_density_csv(w, ext.extended);
    } else {
        write_density_csv(w, inv.density);
    }
}

void run_induce_stats(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    PiecewiseMap map = make_example(cfg.map);
    const InductionConfig& ic = *cfg.induction;
    TailProfile prof = level_volumes(map, ic.n_max, ic.n_samples, cfg.seed, ic.component);
    write_tails_csv(w, prof);
}

void run_asymptotics(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    PiecewiseMap map = make_example(cfg.map);
    if (map.local_form != LocalForm::neutral2d)
        fail(ErrorCode::BadConfig, "asymptotics command targets the planar example map");
    const AsymptoticsConfig& ac = *cfg.asymptotics;
    double start = 0.2;
    BackwardOrbit ox = backward_orbit(map, pt2(start, 0.0), ac.orbit_length);
    BackwardOrbit oy = backward_orbit(map, pt2(0.0, start), ac.orbit_length);

    auto claim = [](const std::string& id, double fitted, double expected, double tol) {
        json c;
        c["claim"] = id;
        c["fitted"] = fitted;
        c["expected"] = expected;
        c["tolerance"] = tol;
        c["pass"] = std::fabs(fitted - expected) <= tol;
        return c;
    };

    long n = ac.orbit_length;
    double rx = ox.radii[static_cast<size_t>(n - 1)];
    double ry = oy.radii[static_cast<size_t>(n - 1)];
    json claims = json::array();
    claims.push_back(claim("radius_law_x_axis_2n_r2", 2.0 * n * rx * rx, 1.0, 0.05));
    claims.push_back(claim("radius_law_y_axis_4n_r2", 4.0 * n * ry * ry, 1.0, 0.05));
    claims.push_back(claim("det_decay_x_axis",
                           det_product_exponent(ox, ac.window_lo, ac.window_hi).exponent, -2.5, 0.1));
    claims.push_back(claim("det_decay_y_axis",
                           det_product_exponent(oy, ac.window_lo, ac.window_hi).exponent, -1.75, 0.1));
    DistortionCurve curve =
        distortion_ratio_curve(map, pt2(start, 0.0), pt2(0.0, start), n, ac.window_lo, ac.window_hi);
    claims.push_back(claim("distortion_ratio_slope", curve.slope, 0.75, 0.1));
    NormDecayReport nd = norm_decay_check(ox, ac.window_lo, ac.window_hi);
    json ndj;
    ndj["claim"] = "inverse_cocycle_norm_slope_upper_bound";
    ndj["fitted"] = nd.slope;
    ndj["expected"] = -0.5;
    ndj["tolerance"] = 0.05;
    ndj["pass"] = nd.slope <= -0.5 + 0.05 && nd.power_law_ok;
    claims.push_back(ndj);

    json j;
    j["claims"] = claims;
    w.write_json("asymptotics.json", j);
}

void run_seminorm(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    PiecewiseMap map = make_example(cfg.map);
    const TransferConfig& tc = *cfg.transfer;
    const QuasiHolderBlock& qb = *cfg.quasi_holder;
    UlamPartition part = build_partition(map, map.domain, tc.resolution);
    TransferOptions topt;
    topt.jitter = tc.jitter;
    TransferMatrix matrix = build_transfer(map, part, tc.samples_per_cell, cfg.seed, topt);
    QuasiHolderConfig qc;
    qc.alpha = qb.alpha;
    qc.eps0 = qb.eps0;
    qc.k_max = qb.k_max;
    std::vector<GridDensity> family = default_test_family(part, qb.n_indicators, qb.n_trig, cfg.seed);
    LYReport rep = ly_estimate(matrix, family, qc);
    write_ly_json(w, rep, 1.0);
}

void run_audit_cmd(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    PiecewiseMap map = make_example(cfg.map);
    AuditReport rep = run_audit(map, *cfg.audit, cfg.seed);
    write_audit_json(w, rep);
}

}  // namespace

int run_command(const ExperimentConfig& cfg, const std::string& command) {
    validate_for_command(cfg, command);
    ArtifactWriter w(cfg.out_dir, cfg.config_hash(), cfg.seed);
    try {
        if (command == "classify") run_classify(cfg, w);
        else if (command == "density") run_density(cfg, w);
        else if (command == "induce-stats") run_induce_stats(cfg, w);
        else if (command == "asymptotics") run_asymptotics(cfg, w);
        else if (command == "seminorm") run_seminorm(cfg, w);
        else if (command == "audit") run_audit_cmd(cfg, w);
        else fail(ErrorCode::BadConfig, "unknown command '" + command + "'");
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BadConfig) throw;
        write_errors_json(w, command, error_code_name(e.code()), e.what());
        return 3;
    }
    return 0;
}

}  // namespace acim
