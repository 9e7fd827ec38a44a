#include "hawkes/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hawkes {

namespace {

void check_W(const EventStream& stream, double W) {
    if (!(W > 0.0) || !(W < stream.horizon / 2.0))
        throw std::invalid_argument("W out of range");
}

// #{s in z : lo < s <= hi}
struct WindowCounter {
    const std::vector<double>& z;
    std::size_t lo_ptr = 0;
    std::size_t hi_ptr = 0;

    explicit WindowCounter(const std::vector<double>& zj) : z(zj) {}

    // lo and hi must be nondecreasing across calls
    long advance(double lo, double hi) {
        while (hi_ptr < z.size() && z[hi_ptr] <= hi) ++hi_ptr;
        while (lo_ptr < z.size() && z[lo_ptr] <= lo) ++lo_ptr;
        return static_cast<long>(hi_ptr) - static_cast<long>(lo_ptr);
    }
};

// sum over tau in zi, tau' in zj of (2W - |tau' - tau|)^+ via prefix sums
double pair_weight_sum(const std::vector<double>& zi, const std::vector<double>& zj,
                       double W) {
    if (zi.empty() || zj.empty()) return 0.0;
    std::vector<double> prefix(zj.size() + 1, 0.0);
    for (std::size_t k = 0; k < zj.size(); ++k) prefix[k + 1] = prefix[k] + zj[k];

    double total = 0.0;
    std::size_t a = 0, mid = 0, b = 0;
    for (double tau : zi) {
        while (a < zj.size() && zj[a] < tau - 2.0 * W) ++a;
        while (mid < zj.size() && zj[mid] <= tau) ++mid;
        while (b < zj.size() && zj[b] <= tau + 2.0 * W) ++b;
        const double cnt_le = static_cast<double>(mid - a);
        const double sum_le = prefix[mid] - prefix[a];
        const double cnt_gt = static_cast<double>(b - mid);
        const double sum_gt = prefix[b] - prefix[mid];
        total += cnt_le * (2.0 * W - tau) + sum_le + cnt_gt * (2.0 * W + tau) - sum_gt;
    }
    return total;
}

// centred window counts cnt_j(tau) - 2W lambda_j for every tau in zi
std::vector<double> centred_counts(const std::vector<double>& zi,
                                   const std::vector<double>& zj, double W,
                                   double lambda_j, double T) {
    std::vector<double> out(zi.size());
    WindowCounter wc(zj);
    for (std::size_t k = 0; k < zi.size(); ++k) {
        const double lo = std::max(zi[k] - W, 0.0);
        const double hi = std::min(zi[k] + W, T);
        out[k] = static_cast<double>(wc.advance(lo, hi)) - 2.0 * W * lambda_j;
    }
    return out;
}

// general third-cumulant estimator K_hat(i,j,k); callers pass (i,i,j) for Kc
double k_triple(const EventStream& stream, const Eigen::VectorXd& lambda, double W,
                int i, int j, int k) {
    const double T = stream.horizon;
    const auto wj = centred_counts(stream.events[i], stream.events[j], W, lambda(j), T);
    const auto wk = centred_counts(stream.events[i], stream.events[k], W, lambda(k), T);
    double term1 = 0.0;
    for (std::size_t s = 0; s < wj.size(); ++s) term1 += wj[s] * wk[s];
    const double pair = pair_weight_sum(stream.events[j], stream.events[k], W);
    return term1 / T - lambda(i) * pair / T +
           4.0 * W * W * lambda(i) * lambda(j) * lambda(k);
}

} // namespace

Eigen::VectorXd estimate_lambda(const EventStream& stream) {
    if (!(stream.horizon > 0.0)) throw std::invalid_argument("zero horizon");
    Eigen::VectorXd lambda(stream.dim);
    for (int i = 0; i < stream.dim; ++i)
        lambda(i) = static_cast<double>(stream.events[i].size()) / stream.horizon;
    return lambda;
}

Eigen::MatrixXd estimate_C(const EventStream& stream, double W) {
    check_W(stream, W);
    const Eigen::VectorXd lambda = estimate_lambda(stream);
    const double T = stream.horizon;
    const int m = stream.dim;
    Eigen::MatrixXd C(m, m);
#pragma omp parallel for collapse(2) schedule(static)
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const auto& zi = stream.events[i];
            WindowCounter wc(stream.events[j]);
            double acc = 0.0;
            for (double tau : zi) {
                const double lo = std::max(tau - W, 0.0);
                const double hi = std::min(tau + W, T);
                acc += static_cast<double>(wc.advance(lo, hi)) - 2.0 * W * lambda(j);
            }
            C(i, j) = acc / T;
        }
    }
    return C;
}

Eigen::MatrixXd estimate_Kc(const EventStream& stream, double W) {
    check_W(stream, W);
    const Eigen::VectorXd lambda = estimate_lambda(stream);
    const int m = stream.dim;
    Eigen::MatrixXd Kc(m, m);
#pragma omp parallel for collapse(2) schedule(static)
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) Kc(i, j) = k_triple(stream, lambda, W, i, i, j);
    return Kc;
}

CumulantSet estimate_cumulants(const EventStream& stream, double W) {
    CumulantSet cs;
    cs.lambda = estimate_lambda(stream);
    cs.C = estimate_C(stream, W);
    cs.Kc = estimate_Kc(stream, W);
    cs.W = W;
    cs.T = stream.horizon;
    return cs;
}

Eigen::MatrixXd covariance_density(const EventStream& stream, double t, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    const Eigen::VectorXd lambda = estimate_lambda(stream);
    const double T = stream.horizon;
    const int m = stream.dim;
    Eigen::MatrixXd Cd(m, m);
#pragma omp parallel for collapse(2) schedule(static)
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const auto& zi = stream.events[i];
            WindowCounter wc(stream.events[j]);
            double acc = 0.0;
            for (double tau : zi) {
                const double lo = std::min(std::max(tau + t, 0.0), T);
                const double hi = std::min(std::max(tau + t + delta, 0.0), T);
                acc += static_cast<double>(wc.advance(lo, hi)) - delta * lambda(j);
            }
            Cd(i, j) = acc / (delta * T);
        }
    }
    return Cd;
}

WSelection select_W(const EventStream& stream, double delta, double multiple,
                    int n_lags, double max_lag) {
    if (stream.total_events() == 0) throw std::invalid_argument("stream has no events");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (n_lags < 4) throw std::invalid_argument("need at least 4 lags");
    if (max_lag <= 0.0) max_lag = stream.horizon / 8.0;
    if (max_lag <= delta) throw std::invalid_argument("max_lag must exceed delta");

    std::vector<double> lags(n_lags);
    const double ratio = std::pow(max_lag / delta, 1.0 / (n_lags - 1));
    for (int k = 0; k < n_lags; ++k) lags[k] = delta * std::pow(ratio, k);

    std::vector<double> norms(n_lags);
    std::vector<std::vector<double>> entries(n_lags);
    for (int k = 0; k < n_lags; ++k) {
        const Eigen::MatrixXd Cd = covariance_density(stream, lags[k], delta);
        norms[k] = Cd.norm();
        entries[k].reserve(Cd.size());
        for (int r = 0; r < Cd.rows(); ++r)
            for (int c = 0; c < Cd.cols(); ++c) entries[k].push_back(std::abs(Cd(r, c)));
    }

    // noise floor: 2 x median absolute entry over the largest lag decade,
    // mapped to a Frobenius-norm scale by the factor m
    std::vector<double> tail;
    for (int k = 0; k < n_lags; ++k)
        if (lags[k] >= max_lag / 10.0)
            tail.insert(tail.end(), entries[k].begin(), entries[k].end());
    std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
    const double floor = 2.0 * tail[tail.size() / 2] * stream.dim;

    int tau_idx = -1;
    for (int k = n_lags - 1; k >= 0; --k) {
        if (norms[k] <= floor) tau_idx = k;
        else break;
    }

    WSelection sel;
    if (tau_idx < 0) {
        const double mean_dt = stream.horizon / static_cast<double>(stream.total_events());
        sel.W = 100.0 * mean_dt;
        sel.tau_c = 0.0;
        sel.fallback = true;
        return sel;
    }
    sel.tau_c = lags[tau_idx];
    sel.W = multiple * sel.tau_c;
    sel.fallback = false;
    return sel;
}

} // namespace hawkes
