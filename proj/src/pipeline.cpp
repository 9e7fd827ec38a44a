#include "hawkes/pipeline.hpp"

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <charconv>
#include <exception>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace hawkes {

using json = nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = j.size();
    if (rows == 0) return Eigen::MatrixXd(0, 0);
    const auto cols = j.at(0).size();
    Eigen::MatrixXd M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t c = 0; c < cols; ++c) M(i, c) = j.at(i).at(c).get<double>();
    return M;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

std::string init_name(NphcInit init) {
    switch (init) {
        case NphcInit::identity: return "identity";
        case NphcInit::sqrt_C: return "sqrt_C";
        case NphcInit::custom: return "custom";
    }
    return "sqrt_C";
}

NphcInit init_from_name(const std::string& name) {
    if (name == "identity") return NphcInit::identity;
    if (name == "sqrt_C") return NphcInit::sqrt_C;
    if (name == "custom") return NphcInit::custom;
    throw std::invalid_argument("unknown NPHC init '" + name + "'");
}

} // namespace

void PipelineConfig::validate() const {
    window.validate();
    nphc.validate();
    cp.validate();
    if (!(spd_floor_rel > 0.0))
        throw std::invalid_argument("spd_floor_rel must be positive");
    if (!(W_multiple > 0.0)) throw std::invalid_argument("W_multiple must be positive");
}

PipelineResult run_pipeline(const PipelineConfig& config, const EventStream& events) {
    config.validate();
#ifdef _OPENMP
    if (config.threads > 0) omp_set_num_threads(config.threads);
#endif

    PipelineResult result;
    const auto windows = slice_windows(events, config.window);
    const int n = static_cast<int>(windows.size());
    if (n < config.cp.min_segment)
        throw std::runtime_error("fewer windows than min_segment");

    if (config.W > 0.0) {
        result.wsel.W = config.W;
        result.wsel.tau_c = 0.0;
        result.wsel.fallback = false;
    } else {
        const double delta =
            config.W_delta > 0.0
                ? config.W_delta
                : events.horizon / static_cast<double>(events.total_events());
        result.wsel = select_W(events, delta, config.W_multiple);
    }
    const double W = result.wsel.W;
    if (!(W < config.window.length / 2.0))
        throw std::runtime_error("selected W does not fit the window length");

    result.window_counts.resize(n);
    result.window_starts.resize(n);
    result.cumulants.resize(n);
    result.kernels.resize(n);
    result.snapshots.resize(n);

    std::vector<std::pair<int, std::exception_ptr>> errors;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k) {
        try {
            const EventStream& win = windows[k];
            CumulantSet cs = estimate_cumulants(win, W);
            if (config.symmetrize_C) cs.C = 0.5 * (cs.C + cs.C.transpose()).eval();
            KernelMatrix km = fit_R(cs, config.nphc);
            result.snapshots[k] =
                CausalSnapshot::from_kernel(k, km.H, config.spd_floor_rel);
            result.window_counts[k] = static_cast<int>(win.total_events());
            result.window_starts[k] = config.window.origin + k * config.window.stride;
            result.cumulants[k] = std::move(cs);
            result.kernels[k] = std::move(km);
        } catch (...) {
#pragma omp critical
            errors.emplace_back(k, std::current_exception());
        }
    }
    if (!errors.empty()) {
        auto [k, eptr] = errors.front();
        try {
            std::rethrow_exception(eptr);
        } catch (const std::exception& e) {
            throw std::runtime_error("window " + std::to_string(k) + ": " + e.what());
        }
    }

    std::vector<Eigen::MatrixXd> logs;
    logs.reserve(n);
    for (const auto& snap : result.snapshots) logs.push_back(snap.logL);
    result.report = detect_multiple_logs(logs, config.cp, config.seed);
    return result;
}

CpReport detect_on_snapshots(const std::vector<CausalSnapshot>& snapshots,
                             const CpConfig& config, std::uint64_t seed) {
    std::vector<Eigen::MatrixXd> logs;
    logs.reserve(snapshots.size());
    for (const auto& snap : snapshots) logs.push_back(snap.logL);
    return detect_multiple_logs(logs, config, seed);
}

json config_to_json(const PipelineConfig& config) {
    json j;
    j["window-length"] = config.window.length;
    j["window-stride"] = config.window.stride;
    j["window-origin"] = config.window.origin;
    j["W"] = config.W;
    j["W-delta"] = config.W_delta;
    j["W-multiple"] = config.W_multiple;
    j["kappa"] = config.nphc.kappa;
    j["nphc-iters"] = config.nphc.max_iters;
    j["nphc-step"] = config.nphc.step_size;
    j["nphc-tol"] = config.nphc.tol;
    j["nphc-init"] = init_name(config.nphc.init);
    j["alpha"] = config.cp.alpha;
    j["c"] = config.cp.c;
    j["grid"] = config.cp.grid;
    j["mc-samples"] = config.cp.mc_samples;
    j["min-segment"] = config.cp.min_segment;
    j["max-depth"] = config.cp.max_depth;
    j["spd-floor-rel"] = config.spd_floor_rel;
    j["symmetrize-C"] = config.symmetrize_C;
    j["seed"] = config.seed;
    j["threads"] = config.threads;
    j["emit-intermediate"] = config.emit_intermediate;
    j["include-logs"] = config.include_logs;
    return j;
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    c.window.length = j.at("window-length").get<double>();
    c.window.stride = j.at("window-stride").get<double>();
    c.window.origin = j.value("window-origin", 0.0);
    c.W = j.value("W", 0.0);
    c.W_delta = j.value("W-delta", 0.0);
    c.W_multiple = j.value("W-multiple", 5.0);
    c.nphc.kappa = j.value("kappa", -1.0);
    c.nphc.max_iters = j.value("nphc-iters", 2000);
    c.nphc.step_size = j.value("nphc-step", 0.01);
    c.nphc.tol = j.value("nphc-tol", 1e-8);
    c.nphc.init = init_from_name(j.value("nphc-init", std::string("sqrt_C")));
    c.cp.alpha = j.value("alpha", 0.05);
    c.cp.c = j.value("c", 0.1);
    c.cp.grid = j.value("grid", 1000);
    c.cp.mc_samples = j.value("mc-samples", 10000);
    c.cp.min_segment = j.value("min-segment", 10);
    c.cp.max_depth = j.value("max-depth", 6);
    c.spd_floor_rel = j.value("spd-floor-rel", 1e-8);
    c.symmetrize_C = j.value("symmetrize-C", false);
    c.seed = j.value("seed", std::uint64_t{0});
    c.threads = j.value("threads", 0);
    c.emit_intermediate = j.value("emit-intermediate", false);
    c.include_logs = j.value("include-logs", false);
    return c;
}

json cumulants_to_json(const CumulantSet& cs, int window_index) {
    json j;
    j["window_index"] = window_index;
    j["lambda"] = vector_to_json(cs.lambda);
    j["C"] = matrix_to_json(cs.C);
    j["Kc"] = matrix_to_json(cs.Kc);
    j["W"] = cs.W;
    j["T"] = cs.T;
    return j;
}

json kernel_to_json(const KernelMatrix& km, const CumulantSet& cs, int window_index) {
    json j;
    j["window_index"] = window_index;
    j["H"] = matrix_to_json(km.H);
    j["loss"] = km.fit_loss;
    j["spectral_radius"] = spectral_radius(km.H);
    const double hn = km.H.norm();
    j["antisym_ratio"] =
        hn > 0.0 ? (0.5 * (km.H - km.H.transpose())).norm() / hn : 0.0;
    // mu recovered through lambda = R mu; emitted as a convenience
    const Eigen::MatrixXd ImH =
        Eigen::MatrixXd::Identity(km.H.rows(), km.H.cols()) - km.H;
    j["mu_hat"] = vector_to_json(ImH * cs.lambda);
    return j;
}

json snapshot_to_json(const CausalSnapshot& snap, bool include_logs) {
    json j;
    j["window_index"] = snap.window_index;
    j["A"] = matrix_to_json(snap.A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(snap.Lbar);
    j["laplacian_eig_min"] = es.eigenvalues().minCoeff();
    j["laplacian_eig_max"] = es.eigenvalues().maxCoeff();
    j["spd_floor_applied"] = snap.floored;
    j["spd_floor"] = snap.eps;
    j["antisym_ratio"] = snap.antisym_ratio;
    if (include_logs) j["logL"] = matrix_to_json(snap.logL);
    return j;
}

namespace {

json segment_to_json(const CpReport& report, int idx) {
    const SegmentRecord& rec = report.segments[idx];
    json j;
    j["lo"] = rec.lo;
    j["hi"] = rec.hi;
    j["depth"] = rec.depth;
    j["tested"] = rec.tested;
    j["rejected"] = rec.rejected;
    if (!rec.reason.empty()) j["reason"] = rec.reason;
    if (rec.tested) {
        j["sigma2"] = rec.sigma2;
        j["sup_stat"] = rec.sup_stat;
        j["profile_k_lo"] = rec.lo + rec.profile.k_lo;
        j["profile"] = rec.profile.ntn;
    }
    if (rec.rejected) {
        j["change_index"] = rec.k_global;
        j["depth_capped"] = rec.depth_capped;
    }
    json children = json::array();
    for (int child : rec.children) children.push_back(segment_to_json(report, child));
    j["children"] = std::move(children);
    return j;
}

} // namespace

json report_to_json(const CpReport& report) {
    json j;
    j["changes"] = report.change_indices;
    j["threshold"] = report.threshold;
    j["tree"] = report.segments.empty() ? json() : segment_to_json(report, 0);
    return j;
}

std::vector<CausalSnapshot> snapshots_from_json_file(const std::string& path,
                                                     double spd_floor_rel) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json doc = json::parse(in);
    const json& arr = doc.is_array() ? doc : doc.at("snapshots");
    std::vector<CausalSnapshot> snaps;
    snaps.reserve(arr.size());
    for (const auto& item : arr) {
        Eigen::MatrixXd A = matrix_from_json(item.at("A"));
        const int idx = item.value("window_index", static_cast<int>(snaps.size()));
        snaps.push_back(CausalSnapshot::from_kernel(idx, A, spd_floor_rel));
    }
    return snaps;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

void write_profiles(const PipelineResult& result, const json& config_json,
                    const std::string& out_dir) {
    const std::string config_line = "# config: " + config_json.dump() + "\n";
    for (std::size_t s = 0; s < result.report.segments.size(); ++s) {
        const SegmentRecord& rec = result.report.segments[s];
        if (!rec.tested) continue;
        std::string text = config_line;
        text += "window_index\tstat\tthreshold\n";
        for (std::size_t i = 0; i < rec.profile.ntn.size(); ++i) {
            const int k = rec.lo + rec.profile.k_lo + static_cast<int>(i);
            text += std::to_string(k) + '\t' + fmt_double(rec.profile.ntn[i]) + '\t' +
                    fmt_double(result.report.threshold) + '\n';
        }
        write_text(out_dir + "/profile_" + std::to_string(s) + ".tsv", text);
    }
}

} // namespace

void write_artifacts(const PipelineResult& result, const PipelineConfig& config,
                     const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const json config_json = config_to_json(config);

    json changes = report_to_json(result.report);
    changes["config"] = config_json;
    changes["W_used"] = result.wsel.W;
    changes["W_tau_c"] = result.wsel.tau_c;
    changes["W_fallback"] = result.wsel.fallback;
    write_text(out_dir + "/changes.json", changes.dump(2) + "\n");

    write_profiles(result, config_json, out_dir);

    std::string counts = "# config: " + config_json.dump() + "\n";
    counts += "window_index\tevents\n";
    for (std::size_t k = 0; k < result.window_counts.size(); ++k)
        counts += std::to_string(k) + '\t' + std::to_string(result.window_counts[k]) + '\n';
    write_text(out_dir + "/events_per_window.tsv", counts);

    if (config.emit_intermediate) {
        json cum = json::array(), ker = json::array(), snap = json::array();
        for (std::size_t k = 0; k < result.cumulants.size(); ++k) {
            cum.push_back(cumulants_to_json(result.cumulants[k], static_cast<int>(k)));
            ker.push_back(kernel_to_json(result.kernels[k], result.cumulants[k],
                                         static_cast<int>(k)));
            snap.push_back(snapshot_to_json(result.snapshots[k], config.include_logs));
        }
        json jc = {{"config", config_json}, {"cumulants", std::move(cum)}};
        json jk = {{"config", config_json}, {"kernels", std::move(ker)}};
        json js = {{"config", config_json}, {"snapshots", std::move(snap)}};
        write_text(out_dir + "/cumulants.json", jc.dump(2) + "\n");
        write_text(out_dir + "/kernels.json", jk.dump(2) + "\n");
        write_text(out_dir + "/snapshots.json", js.dump(2) + "\n");
    }
}

std::uint64_t params_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace hawkes
