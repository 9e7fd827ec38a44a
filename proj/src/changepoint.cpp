#include "hawkes/changepoint.hpp"

#include "hawkes/geometry.hpp"
#include "hawkes/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hawkes {

namespace {

constexpr double kSigmaDegenerate = 1e-14;

std::vector<Eigen::MatrixXd> to_logs(std::span<const Eigen::MatrixXd> spd) {
    std::vector<Eigen::MatrixXd> logs;
    logs.reserve(spd.size());
    for (const auto& X : spd) logs.push_back(spd_log(X));
    return logs;
}

Eigen::MatrixXd mean_of(std::span<const Eigen::MatrixXd> logs, std::size_t lo,
                        std::size_t hi) {
    Eigen::MatrixXd acc = logs[lo];
    for (std::size_t i = lo + 1; i < hi; ++i) acc += logs[i];
    return acc / static_cast<double>(hi - lo);
}

double mean_sqdist(std::span<const Eigen::MatrixXd> logs, std::size_t lo,
                   std::size_t hi, const Eigen::MatrixXd& centre) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += (logs[i] - centre).squaredNorm();
    return acc / static_cast<double>(hi - lo);
}

} // namespace

void CpConfig::validate() const {
    if (!(c > 0.0 && c < 0.5)) throw std::invalid_argument("c must lie in (0, 0.5)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
    if (grid < 100) throw std::invalid_argument("grid must be at least 100");
    if (mc_samples < 100) throw std::invalid_argument("mc_samples must be at least 100");
    if (min_segment < 4) throw std::invalid_argument("min_segment must be at least 4");
    if (max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
}

SegmentStats segment_stats_logs(std::span<const Eigen::MatrixXd> logs, int k) {
    const int n = static_cast<int>(logs.size());
    if (k < 1 || k > n - 1) throw std::invalid_argument("empty segment");
    const Eigen::MatrixXd m1 = mean_of(logs, 0, k);
    const Eigen::MatrixXd m2 = mean_of(logs, k, n);
    SegmentStats s;
    s.V1 = mean_sqdist(logs, 0, k, m1);
    s.V2 = mean_sqdist(logs, k, n, m2);
    s.V1C = mean_sqdist(logs, 0, k, m2);
    s.V2C = mean_sqdist(logs, k, n, m1);
    return s;
}

SegmentStats segment_frechet_stats(std::span<const Eigen::MatrixXd> spd, int k) {
    const auto logs = to_logs(spd);
    return segment_stats_logs(logs, k);
}

double sigma2_logs(std::span<const Eigen::MatrixXd> logs) {
    const int n = static_cast<int>(logs.size());
    if (n < 2) throw std::invalid_argument("need at least two snapshots");
    const Eigen::MatrixXd centre = mean_of(logs, 0, n);
    double s2 = 0.0, s4 = 0.0;
    for (const auto& l : logs) {
        const double d2 = (l - centre).squaredNorm();
        s2 += d2;
        s4 += d2 * d2;
    }
    s2 /= n;
    s4 /= n;
    return std::max(0.0, s4 - s2 * s2);
}

double sigma2_hat(std::span<const Eigen::MatrixXd> spd) {
    const auto logs = to_logs(spd);
    return sigma2_logs(logs);
}

TnProfile tn_profile_logs(std::span<const Eigen::MatrixXd> logs,
                          const CpConfig& config) {
    config.validate();
    const int n = static_cast<int>(logs.size());
    if (n < config.min_segment) throw std::invalid_argument("segment too short");

    TnProfile prof;
    const int nc = static_cast<int>(std::floor(n * config.c));
    prof.k_lo = std::max(nc, 1);
    const int k_hi = std::min(n - nc, n - 1);
    prof.ntn.assign(k_hi - prof.k_lo + 1, 0.0);
    prof.sigma2 = sigma2_logs(logs);
    if (prof.sigma2 < kSigmaDegenerate) {
        prof.degenerate = true;
        return prof;
    }

    // Centre in the log chart; all variances are translation invariant but the
    // prefix-sum cancellations behave better around zero.
    const Eigen::MatrixXd centre = mean_of(logs, 0, n);
    std::vector<Eigen::MatrixXd> prefix(n + 1);
    std::vector<double> qprefix(n + 1, 0.0);
    prefix[0] = Eigen::MatrixXd::Zero(centre.rows(), centre.cols());
    for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXd centred = logs[i] - centre;
        prefix[i + 1] = prefix[i] + centred;
        qprefix[i + 1] = qprefix[i] + centred.squaredNorm();
    }

#pragma omp parallel for schedule(static)
    for (int k = prof.k_lo; k <= k_hi; ++k) {
        const double n1 = k, n2 = n - k;
        const Eigen::MatrixXd mean1 = prefix[k] / n1;
        const Eigen::MatrixXd mean2 = (prefix[n] - prefix[k]) / n2;
        const double V1 = std::max(0.0, qprefix[k] / n1 - mean1.squaredNorm());
        const double V2 =
            std::max(0.0, (qprefix[n] - qprefix[k]) / n2 - mean2.squaredNorm());
        const double between = (mean1 - mean2).squaredNorm();
        // V1C - V1 = V2C - V2 = |mean1 - mean2|^2
        const double u = n1 / n;
        const double diff = V1 - V2;
        const double tn = u * (1.0 - u) / prof.sigma2 *
                          (diff * diff + 4.0 * between * between);
        prof.ntn[k - prof.k_lo] = n * tn;
    }
    return prof;
}

TnProfile tn_profile(std::span<const Eigen::MatrixXd> spd, const CpConfig& config) {
    const auto logs = to_logs(spd);
    return tn_profile_logs(logs, config);
}

double bb_sup_quantile(const CpConfig& config, std::uint64_t seed) {
    config.validate();
    const int G = config.grid;
    const int i_lo = static_cast<int>(std::ceil(config.c * G));
    const int i_hi = static_cast<int>(std::floor((1.0 - config.c) * G));
    std::vector<double> sups(config.mc_samples);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < config.mc_samples; ++r) {
        Rng rng(split_seed(seed, static_cast<std::uint64_t>(r)));
        const double sd = std::sqrt(1.0 / G);
        double walk = 0.0;
        std::vector<double> w(G + 1);
        w[0] = 0.0;
        for (int i = 1; i <= G; ++i) {
            walk += sd * rng.normal();
            w[i] = walk;
        }
        double sup = 0.0;
        for (int i = i_lo; i <= i_hi; ++i) {
            const double u = static_cast<double>(i) / G;
            const double b = w[i] - u * w[G];
            sup = std::max(sup, b * b / (u * (1.0 - u)));
        }
        sups[r] = sup;
    }
    std::sort(sups.begin(), sups.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil((1.0 - config.alpha) * config.mc_samples));
    return sups[std::min(rank, sups.size()) - 1];
}

SingleDetection detect_single_logs(std::span<const Eigen::MatrixXd> logs,
                                   const CpConfig& config, double threshold) {
    SingleDetection det;
    det.threshold = threshold;
    if (static_cast<int>(logs.size()) < config.min_segment) {
        det.reason = "segment too short";
        return det;
    }
    const TnProfile prof = tn_profile_logs(logs, config);
    if (prof.degenerate) {
        det.reason = "degenerate segment";
        return det;
    }
    int argmax = 0;
    for (std::size_t i = 1; i < prof.ntn.size(); ++i)
        if (prof.ntn[i] > prof.ntn[argmax]) argmax = static_cast<int>(i);
    det.stat = prof.ntn[argmax];
    if (det.stat > threshold) {
        det.found = true;
        det.k = prof.k_lo + argmax;
    } else {
        det.reason = "no rejection";
    }
    return det;
}

SingleDetection detect_single(std::span<const Eigen::MatrixXd> spd,
                              const CpConfig& config, std::uint64_t seed) {
    const auto logs = to_logs(spd);
    return detect_single_logs(logs, config, bb_sup_quantile(config, seed));
}

namespace {

int segment_pass(std::span<const Eigen::MatrixXd> logs, const CpConfig& config,
                 double threshold, int lo, int hi, int depth, CpReport& report) {
    const int idx = static_cast<int>(report.segments.size());
    report.segments.emplace_back();
    {
        SegmentRecord& rec = report.segments[idx];
        rec.lo = lo;
        rec.hi = hi;
        rec.depth = depth;
    }

    const int n = hi - lo;
    if (n < config.min_segment) {
        report.segments[idx].reason = "segment too short";
        return idx;
    }

    const auto sub = logs.subspan(lo, n);
    TnProfile prof = tn_profile_logs(sub, config);
    SingleDetection det = detect_single_logs(sub, config, threshold);
    {
        SegmentRecord& rec = report.segments[idx];
        rec.tested = true;
        rec.sigma2 = prof.sigma2;
        rec.sup_stat = det.stat;
        rec.profile = std::move(prof);
        rec.reason = det.reason;
    }
    if (!det.found) return idx;

    const int k_global = lo + det.k;
    {
        SegmentRecord& rec = report.segments[idx];
        rec.rejected = true;
        rec.k_global = k_global;
    }
    report.change_indices.push_back(k_global);
    if (depth + 1 > config.max_depth) {
        report.segments[idx].depth_capped = true;
        return idx;
    }
    const int left = segment_pass(logs, config, threshold, lo, k_global, depth + 1, report);
    report.segments[idx].children.push_back(left);
    const int right = segment_pass(logs, config, threshold, k_global, hi, depth + 1, report);
    report.segments[idx].children.push_back(right);
    return idx;
}

} // namespace

CpReport detect_multiple_logs(std::span<const Eigen::MatrixXd> logs,
                              const CpConfig& config, std::uint64_t seed) {
    config.validate();
    CpReport report;
    report.threshold = bb_sup_quantile(config, seed);
    segment_pass(logs, config, report.threshold, 0, static_cast<int>(logs.size()), 0,
                 report);
    std::sort(report.change_indices.begin(), report.change_indices.end());
    return report;
}

CpReport detect_multiple(std::span<const Eigen::MatrixXd> spd, const CpConfig& config,
                         std::uint64_t seed) {
    const auto logs = to_logs(spd);
    return detect_multiple_logs(logs, config, seed);
}

} // namespace hawkes
