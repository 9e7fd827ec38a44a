#pragma once

#include "hawkes/changepoint.hpp"
#include "hawkes/cumulants.hpp"
#include "hawkes/events.hpp"
#include "hawkes/geometry.hpp"
#include "hawkes/nphc.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hawkes {

struct PipelineConfig {
    WindowSpec window{0.0, 0.0, 0.0};
    double W = 0.0;          // fixed truncation half-width; <= 0 selects auto
    double W_delta = 0.0;    // covariance-density bin; <= 0 derives from data
    double W_multiple = 5.0;
    NphcConfig nphc;
    CpConfig cp;
    double spd_floor_rel = 1e-8;
    bool symmetrize_C = false;
    std::uint64_t seed = 0;
    int threads = 0; // 0 = library default
    bool emit_intermediate = false;
    bool include_logs = false;

    void validate() const;
};

struct PipelineResult {
    WSelection wsel;
    std::vector<int> window_counts;
    std::vector<double> window_starts;
    std::vector<CumulantSet> cumulants;
    std::vector<KernelMatrix> kernels;
    std::vector<CausalSnapshot> snapshots;
    CpReport report;
};

/// simulate -> window -> cumulants -> NPHC -> geometry -> detect, fanned out
/// across windows. Deterministic given (events, config); independent of the
/// worker-pool size.
PipelineResult run_pipeline(const PipelineConfig& config, const EventStream& events);

/// Change-point detection on precomputed snapshots (the detect subcommand's
/// snapshot-JSON path).
CpReport detect_on_snapshots(const std::vector<CausalSnapshot>& snapshots,
                             const CpConfig& config, std::uint64_t seed);

nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& j);

nlohmann::json cumulants_to_json(const CumulantSet& cs, int window_index);
nlohmann::json kernel_to_json(const KernelMatrix& km, const CumulantSet& cs,
                              int window_index);
nlohmann::json snapshot_to_json(const CausalSnapshot& snap, bool include_logs);
nlohmann::json report_to_json(const CpReport& report);

/// Rebuilds snapshots from the adjacency matrices stored in a snapshots.json
/// artifact (Laplacian, SPD projection and logs are re-derived).
std::vector<CausalSnapshot> snapshots_from_json_file(const std::string& path,
                                                     double spd_floor_rel);

/// Writes changes.json, per-segment profile TSVs and events_per_window.tsv;
/// with emit_intermediate also cumulants.json, kernels.json, snapshots.json.
/// Every artifact embeds the resolved config.
void write_artifacts(const PipelineResult& result, const PipelineConfig& config,
                     const std::string& out_dir);

/// FNV-1a over the canonical JSON encoding; stable across runs and platforms.
std::uint64_t params_hash(const nlohmann::json& j);

} // namespace hawkes
