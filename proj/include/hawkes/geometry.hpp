#pragma once

#include <Eigen/Dense>

#include <span>

namespace hawkes {

struct SymmetrizeResult {
    Eigen::MatrixXd A;
    double antisym_ratio; // |antisymmetric part|_F / |symmetric part|_F
};

/// A = (H + H^T)/2 with the relative size of the discarded part as diagnostic.
SymmetrizeResult symmetrize(const Eigen::MatrixXd& H);

/// Signed Laplacian Lbar = Dbar - A with unsigned degrees
/// Dbar_ii = sum_j |A_ij| (the sum includes j = i). Positive semi-definite
/// for any symmetric A.
Eigen::MatrixXd signed_laplacian(const Eigen::MatrixXd& A);

/// Frobenius-nearest symmetric positive definite matrix subject to the
/// eigenvalue floor eps: symmetrize, clamp eigenvalues below eps, rebuild.
Eigen::MatrixXd nearest_spd(const Eigen::MatrixXd& M, double eps);

/// Relative eigenvalue floor used for Laplacian projection:
/// rel x mean |diagonal|, with an absolute fallback when the diagonal is zero.
double default_spd_floor(const Eigen::MatrixXd& Lbar, double rel = 1e-8);

/// Principal matrix logarithm / exponential of an SPD / symmetric matrix via
/// symmetric eigendecomposition.
Eigen::MatrixXd spd_log(const Eigen::MatrixXd& X);
Eigen::MatrixXd spd_exp(const Eigen::MatrixXd& S);

/// Log-Euclidean distance |log X - log Y|_F.
double le_distance(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

/// Closed-form Frechet mean under the Log-Euclidean metric:
/// exp of the average of the logs.
Eigen::MatrixXd frechet_mean(std::span<const Eigen::MatrixXd> spd);

/// (1/n) sum d^2(mean, X_i).
double frechet_variance(std::span<const Eigen::MatrixXd> spd,
                        const Eigen::MatrixXd& mean);

/// Per-window causal-network snapshot: symmetrized kernel matrix, its signed
/// Laplacian, the SPD representative, and the cached matrix logarithm used by
/// every downstream distance computation.
struct CausalSnapshot {
    int window_index = 0;
    Eigen::MatrixXd A;
    Eigen::MatrixXd Lbar;
    Eigen::MatrixXd Ltilde;
    Eigen::MatrixXd logL;
    double antisym_ratio = 0.0;
    double eps = 0.0;        // eigenvalue floor actually used
    bool floored = false;    // true when the floor changed an eigenvalue

    static CausalSnapshot from_kernel(int window_index, const Eigen::MatrixXd& H,
                                      double eps_rel = 1e-8);
};

} // namespace hawkes
