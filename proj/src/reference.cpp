#include "hawkes/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hawkes::reference {

namespace {

double count_window(const std::vector<double>& z, double lo, double hi) {
    double n = 0.0;
    for (double s : z)
        if (s > lo && s <= hi) n += 1.0;
    return n;
}

double lam(const EventStream& stream, int i) {
    return static_cast<double>(stream.events[i].size()) / stream.horizon;
}

} // namespace

Eigen::MatrixXd estimate_C_direct(const EventStream& stream, double W) {
    if (!(W > 0.0) || !(W < stream.horizon / 2.0))
        throw std::invalid_argument("W out of range");
    const double T = stream.horizon;
    const int m = stream.dim;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (double tau : stream.events[i]) {
                const double lo = std::max(tau - W, 0.0);
                const double hi = std::min(tau + W, T);
                acc += count_window(stream.events[j], lo, hi) - 2.0 * W * lam(stream, j);
            }
            C(i, j) = acc / T;
        }
    }
    return C;
}

double estimate_K_direct(const EventStream& stream, double W, int i, int j, int k) {
    const double T = stream.horizon;
    const double li = lam(stream, i), lj = lam(stream, j), lk = lam(stream, k);

    double term1 = 0.0;
    for (double tau : stream.events[i]) {
        const double lo = std::max(tau - W, 0.0);
        const double hi = std::min(tau + W, T);
        const double wj = count_window(stream.events[j], lo, hi) - 2.0 * W * lj;
        const double wk = count_window(stream.events[k], lo, hi) - 2.0 * W * lk;
        term1 += wj * wk;
    }

    double pair = 0.0;
    for (double tau : stream.events[j])
        for (double tau2 : stream.events[k])
            pair += std::max(2.0 * W - std::abs(tau2 - tau), 0.0);

    return term1 / T - li * pair / T + 4.0 * W * W * li * lj * lk;
}

Eigen::MatrixXd estimate_Kc_direct(const EventStream& stream, double W) {
    if (!(W > 0.0) || !(W < stream.horizon / 2.0))
        throw std::invalid_argument("W out of range");
    const int m = stream.dim;
    Eigen::MatrixXd Kc(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) Kc(i, j) = estimate_K_direct(stream, W, i, i, j);
    return Kc;
}

} // namespace hawkes::reference
