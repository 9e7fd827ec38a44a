#include "hawkes/simulate.hpp"

#include "hawkes/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hawkes {

void HawkesParams::validate() const {
    const int m = dim();
    if (m < 1) throw std::invalid_argument("params need at least one subject");
    if (alpha.rows() != m || alpha.cols() != m || beta.rows() != m || beta.cols() != m)
        throw std::invalid_argument("alpha/beta shape mismatch");
    if ((mu.array() < 0.0).any())
        throw std::invalid_argument("background rates must be nonnegative");
    if (!(beta.array() > 0.0).all())
        throw std::invalid_argument("decay rates must be strictly positive");
    if (spectral_radius(kernel_integral(*this)) >= 1.0)
        throw std::invalid_argument("nonstationary parameters");
}

void Scenario::validate() const {
    if (segments.empty()) throw std::invalid_argument("scenario has no segments");
    const int m = segments.front().params.dim();
    for (const auto& seg : segments) {
        if (!(seg.duration > 0.0))
            throw std::invalid_argument("segment durations must be positive");
        if (seg.params.dim() != m)
            throw std::invalid_argument("segments disagree on dimension");
        seg.params.validate();
    }
}

Eigen::MatrixXd kernel_integral(const HawkesParams& params) {
    return (params.alpha.array() / params.beta.array()).matrix();
}

double spectral_radius(const Eigen::MatrixXd& H) {
    if (H.rows() != H.cols()) throw std::invalid_argument("matrix must be square");
    if (H.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(H, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

EventStream simulate(const HawkesParams& params, double T, std::uint64_t seed) {
    params.validate();
    if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");

    const int m = params.dim();
    Rng rng(seed);

    // g(i,j) aggregates subject j's decayed excitation of subject i. Its sign
    // equals sign(alpha_ij) and its magnitude only decays between events, so
    // mu_i + sum_j max(g_ij, 0) bounds lambda_i on the whole next interval.
    Eigen::ArrayXXd g = Eigen::ArrayXXd::Zero(m, m);
    const Eigen::ArrayXXd beta = params.beta.array();
    const Eigen::ArrayXXd alpha = params.alpha.array();
    const Eigen::ArrayXd mu = params.mu.array();

    std::vector<std::vector<double>> events(m);
    Eigen::ArrayXd lambda(m);
    double t = 0.0;
    while (true) {
        const double bound = (mu + g.max(0.0).rowwise().sum()).sum();
        if (bound <= 0.0) break;
        const double wait = rng.exponential(bound);
        const double t_cand = t + wait;
        if (t_cand > T) break;
        g *= (-beta * (t_cand - t)).exp();
        t = t_cand;
        lambda = (mu + g.rowwise().sum()).max(0.0);
        const double total = lambda.sum();
        const double u = rng.uniform() * bound;
        if (u >= total) continue; // thinned out
        int subject = 0;
        double acc = lambda(0);
        while (u >= acc && subject + 1 < m) acc += lambda(++subject);
        double stamp = t;
        auto& z = events[subject];
        while (!z.empty() && stamp <= z.back())
            stamp = std::nextafter(stamp, std::numeric_limits<double>::infinity());
        z.push_back(stamp);
        g.col(subject) += alpha.col(subject);
    }
    return EventStream::create(m, T, std::move(events));
}

ScenarioResult simulate_scenario(const Scenario& scenario) {
    scenario.validate();
    std::vector<std::vector<double>> events(scenario.segments.front().params.dim());
    std::vector<double> change_times;
    double offset = 0.0;
    for (std::size_t k = 0; k < scenario.segments.size(); ++k) {
        const auto& seg = scenario.segments[k];
        EventStream part =
            simulate(seg.params, seg.duration, split_seed(scenario.seed, k));
        for (int i = 0; i < part.dim; ++i) {
            auto& z = events[i];
            for (double s : part.events[i]) {
                double stamp = offset + s;
                while (!z.empty() && stamp <= z.back())
                    stamp = std::nextafter(stamp, std::numeric_limits<double>::infinity());
                z.push_back(stamp);
            }
        }
        offset += seg.duration;
        if (k + 1 < scenario.segments.size()) change_times.push_back(offset);
    }
    ScenarioResult result;
    result.stream = EventStream::create(
        static_cast<int>(events.size()), offset, std::move(events));
    result.change_times = std::move(change_times);
    return result;
}

namespace {

Eigen::MatrixXd draw_beta(Rng& rng, int dim) {
    Eigen::MatrixXd beta(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) beta(i, j) = 0.5 + rng.uniform();
    return beta;
}

Eigen::MatrixXd draw_alpha(Rng& rng, int dim) {
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            a(i, j) = (i == j) ? 0.125 : rng.normal(0.0, 0.125);
    return Eigen::MatrixXd(0.5 * (a + a.transpose()));
}

} // namespace

HawkesParams random_params(int dim, std::uint64_t seed, int max_draws) {
    if (dim < 1) throw std::invalid_argument("dim must be at least 1");
    Rng rng(seed);
    HawkesParams params;
    params.mu = Eigen::VectorXd::Constant(dim, 0.3);
    for (int attempt = 0; attempt < max_draws; ++attempt) {
        params.beta = draw_beta(rng, dim);
        params.alpha = draw_alpha(rng, dim);
        if (spectral_radius(kernel_integral(params)) < 1.0) return params;
    }
    throw std::runtime_error("could not draw stationary parameters within cap");
}

Scenario random_switching_scenario(int dim, int n_segments, double segment_len,
                                   std::uint64_t seed) {
    if (dim < 1 || n_segments < 1 || !(segment_len > 0.0))
        throw std::invalid_argument("invalid scenario shape");
    Rng rng(seed);
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(dim, 0.3);
    const Eigen::MatrixXd beta = draw_beta(rng, dim);

    Scenario scenario;
    scenario.seed = seed;
    for (int k = 0; k < n_segments; ++k) {
        HawkesParams params;
        params.mu = mu;
        params.beta = beta;
        bool ok = false;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            params.alpha = draw_alpha(rng, dim);
            if (spectral_radius(kernel_integral(params)) < 1.0) {
                ok = true;
                break;
            }
        }
        if (!ok) throw std::runtime_error("could not draw stationary parameters within cap");
        scenario.segments.push_back({segment_len, std::move(params)});
    }
    return scenario;
}

} // namespace hawkes
