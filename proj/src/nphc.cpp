#include "hawkes/nphc.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hawkes {

void NphcConfig::validate() const {
    if (kappa >= 0.0 && kappa > 1.0)
        throw std::invalid_argument("kappa must lie in [0, 1]");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
    if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
    if (tol < 0.0) throw std::invalid_argument("tol must be nonnegative");
    if (init == NphcInit::custom &&
        (custom_init.rows() == 0 || custom_init.rows() != custom_init.cols()))
        throw std::invalid_argument("custom init must be a square matrix");
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
cumulants_from_R(const Eigen::MatrixXd& R, const Eigen::VectorXd& lambda) {
    if (R.rows() != R.cols() || R.rows() != lambda.size())
        throw std::invalid_argument("shape mismatch");
    const Eigen::MatrixXd C = R * lambda.asDiagonal() * R.transpose();
    const Eigen::MatrixXd R2 = R.cwiseProduct(R);
    // K_iij = sum_l R_il^2 C_jl + 2 R_il C_il R_jl - 2 lambda_l R_il^2 R_jl
    const Eigen::MatrixXd Kc = R2 * C.transpose() +
                               2.0 * R.cwiseProduct(C) * R.transpose() -
                               2.0 * R2 * lambda.asDiagonal() * R.transpose();
    return {C, Kc};
}

double default_kappa(const Eigen::MatrixXd& C_hat, const Eigen::MatrixXd& Kc_hat) {
    const double k2 = Kc_hat.squaredNorm();
    const double c2 = C_hat.squaredNorm();
    if (k2 + c2 == 0.0) return 0.5;
    return k2 / (k2 + c2);
}

LossEval nphc_loss(const Eigen::MatrixXd& R, const Eigen::VectorXd& lambda,
                   const Eigen::MatrixXd& C_hat, const Eigen::MatrixXd& Kc_hat,
                   double kappa) {
    const auto L = lambda.asDiagonal();
    const Eigen::MatrixXd R2 = R.cwiseProduct(R);
    const Eigen::MatrixXd C = R * L * R.transpose();
    const Eigen::MatrixXd RC = R.cwiseProduct(C);
    const Eigen::MatrixXd Kc =
        R2 * C.transpose() + 2.0 * RC * R.transpose() - 2.0 * R2 * L * R.transpose();

    const Eigen::MatrixXd Ec = C - C_hat;
    const Eigen::MatrixXd Ek = Kc - Kc_hat;

    LossEval out;
    out.loss = kappa * Ec.squaredNorm() + (1.0 - kappa) * Ek.squaredNorm();

    const Eigen::MatrixXd Gk = 2.0 * (1.0 - kappa) * Ek;
    const Eigen::MatrixXd GkR = Gk * R;
    // adjoint of C accumulates the direct C residual and the K terms that
    // reach R only through C
    const Eigen::MatrixXd Gc = 2.0 * kappa * Ec + Gk.transpose() * R2 +
                               2.0 * GkR.cwiseProduct(R);

    out.grad = (Gc + Gc.transpose()) * R * L;
    out.grad += 2.0 * (Gk * C).cwiseProduct(R);
    out.grad += 2.0 * GkR.cwiseProduct(C);
    out.grad += 2.0 * Gk.transpose() * RC;
    out.grad -= 4.0 * (GkR * L).cwiseProduct(R);
    out.grad -= 2.0 * Gk.transpose() * R2 * L;
    return out;
}

namespace {

Eigen::MatrixXd initial_R(const CumulantSet& cs, const NphcConfig& config) {
    const int m = static_cast<int>(cs.lambda.size());
    switch (config.init) {
        case NphcInit::identity:
            return Eigen::MatrixXd::Identity(m, m);
        case NphcInit::custom:
            if (config.custom_init.rows() != m)
                throw std::invalid_argument("custom init has wrong dimension");
            return config.custom_init;
        case NphcInit::sqrt_C: {
            if ((cs.lambda.array() == 0.0).any())
                return Eigen::MatrixXd::Identity(m, m);
            Eigen::MatrixXd R0 = Eigen::MatrixXd::Identity(m, m);
            for (int i = 0; i < m; ++i) {
                const double ratio = cs.C(i, i) / cs.lambda(i);
                if (ratio > 0.0) R0(i, i) = std::sqrt(ratio);
            }
            return R0;
        }
    }
    throw std::logic_error("unreachable");
}

[[noreturn]] void throw_divergence(int iter, double loss, const Eigen::MatrixXd& R) {
    std::ostringstream oss;
    oss << "NPHC loss diverged (non-finite) at iteration " << iter << ", loss=" << loss
        << ", iterate:\n"
        << R;
    throw std::runtime_error(oss.str());
}

} // namespace

KernelMatrix fit_R(const CumulantSet& cumulants, const NphcConfig& config) {
    config.validate();
    if (!cumulants.lambda.allFinite() || !cumulants.C.allFinite() ||
        !cumulants.Kc.allFinite())
        throw std::invalid_argument("cumulants must be finite");

    const double kappa = config.kappa >= 0.0
                             ? config.kappa
                             : default_kappa(cumulants.C, cumulants.Kc);
    const Eigen::VectorXd& lambda = cumulants.lambda;

    Eigen::MatrixXd R = initial_R(cumulants, config);
    LossEval cur = nphc_loss(R, lambda, cumulants.C, cumulants.Kc, kappa);
    if (!std::isfinite(cur.loss) || !cur.grad.allFinite())
        throw_divergence(0, cur.loss, R);

    const double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8;
    Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(R.rows(), R.cols());
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(R.rows(), R.cols());

    for (int it = 1; it <= config.max_iters; ++it) {
        if (cur.grad.norm() < config.tol) break;
        m1 = b1 * m1 + (1.0 - b1) * cur.grad;
        m2 = b2 * m2 + (1.0 - b2) * cur.grad.cwiseProduct(cur.grad);
        const double c1 = 1.0 - std::pow(b1, it);
        const double c2 = 1.0 - std::pow(b2, it);
        const Eigen::MatrixXd dir =
            (m1 / c1).cwiseQuotient(((m2 / c2).cwiseSqrt().array() + adam_eps).matrix());

        double lr = config.step_size;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            const Eigen::MatrixXd cand = R - lr * dir;
            LossEval next = nphc_loss(cand, lambda, cumulants.C, cumulants.Kc, kappa);
            if (std::isfinite(next.loss) && next.grad.allFinite() &&
                next.loss <= cur.loss) {
                R = cand;
                cur = std::move(next);
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if (!accepted) break; // no descent direction at any step length
    }

    KernelMatrix km;
    km.R = R;
    km.H = kernel_matrix_from_R(R);
    km.fit_loss = cur.loss;
    return km;
}

Eigen::MatrixXd kernel_matrix_from_R(const Eigen::MatrixXd& R) {
    if (R.rows() != R.cols()) throw std::invalid_argument("R must be square");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(R);
    if (!lu.isInvertible()) throw std::runtime_error("estimated R not invertible");
    const int m = static_cast<int>(R.rows());
    return Eigen::MatrixXd::Identity(m, m) - lu.inverse();
}

} // namespace hawkes
