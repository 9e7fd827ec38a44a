#pragma once

#include "hawkes/cumulants.hpp"

#include <Eigen/Dense>

namespace hawkes {

enum class NphcInit { identity, sqrt_C, custom };

struct NphcConfig {
    double kappa = -1.0; // < 0 selects the scale-balancing default
    int max_iters = 2000;
    double step_size = 0.01;
    double tol = 1e-8; // gradient Frobenius norm
    NphcInit init = NphcInit::sqrt_C;
    Eigen::MatrixXd custom_init;

    void validate() const;
};

/// Fitted kernel-integral matrix H = I - R^{-1} and the matrix R it came from.
struct KernelMatrix {
    Eigen::MatrixXd H;
    Eigen::MatrixXd R;
    double fit_loss = 0.0;
};

/// Theoretical cumulants implied by R and the mean intensities:
/// C_ij = sum_l lambda_l R_il R_jl and the K_iij slice of the cubic relation,
/// evaluated with C = C(R).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
cumulants_from_R(const Eigen::MatrixXd& R, const Eigen::VectorXd& lambda);

struct LossEval {
    double loss;
    Eigen::MatrixXd grad;
};

/// Weighted moment-matching loss
///   (1-kappa) |Kc(R) - Kc_hat|_F^2 + kappa |C(R) - C_hat|_F^2
/// and its exact gradient in R.
LossEval nphc_loss(const Eigen::MatrixXd& R, const Eigen::VectorXd& lambda,
                   const Eigen::MatrixXd& C_hat, const Eigen::MatrixXd& Kc_hat,
                   double kappa);

/// kappa that balances the two residual scales:
/// |Kc_hat|^2 / (|Kc_hat|^2 + |C_hat|^2).
double default_kappa(const Eigen::MatrixXd& C_hat, const Eigen::MatrixXd& Kc_hat);

/// Adam-style first-order minimization of nphc_loss with step halving on loss
/// increase (the accepted-iterate loss sequence never increases).
/// Deterministic given (cumulants, config).
KernelMatrix fit_R(const CumulantSet& cumulants, const NphcConfig& config);

/// H = I - R^{-1}; throws if R is singular.
Eigen::MatrixXd kernel_matrix_from_R(const Eigen::MatrixXd& R);

} // namespace hawkes
