#pragma once

#include "hawkes/events.hpp"

#include <Eigen/Dense>

namespace hawkes {

/// First three integrated cumulants of an event stream, estimated with
/// truncation half-width W on a recording of length T.
struct CumulantSet {
    Eigen::VectorXd lambda; // mean intensities
    Eigen::MatrixXd C;      // integrated covariance density (kept as estimated,
                            // asymmetric in finite samples)
    Eigen::MatrixXd Kc;     // entry (i,j) holds the third-cumulant slice K_iij
    double W = 0.0;
    double T = 0.0;
};

Eigen::VectorXd estimate_lambda(const EventStream& stream);

/// C_hat(i,j) = (1/T) sum_{tau in Z_i} [ N_j((tau+W)^T) - N_j((tau-W) v 0) - 2W lambda_j ].
/// Window counts use the interval (tau-W, tau+W], clipped to [0, T]; the
/// centre event itself is counted when i == j.
Eigen::MatrixXd estimate_C(const EventStream& stream, double W);

/// Kc_hat(i,j) = K_iij estimator: centred-window product term, minus the
/// (2W - |tau' - tau|)^+ pair term over Z_i x Z_j scaled by lambda_i, plus
/// 4 W^2 lambda_i^2 lambda_j.
Eigen::MatrixXd estimate_Kc(const EventStream& stream, double W);

CumulantSet estimate_cumulants(const EventStream& stream, double W);

/// Covariance density at lag t with bin width delta:
/// (1/(delta T)) sum_{tau in Z_i} [ count of Z_j in (tau+t, tau+t+delta], clipped ] - delta lambda_j.
Eigen::MatrixXd covariance_density(const EventStream& stream, double t, double delta);

struct WSelection {
    double W = 0.0;
    double tau_c = 0.0;
    bool fallback = false; // no decay detected; W = 100 x mean inter-event time
};

/// Scans the covariance density on a log-spaced lag grid and returns
/// multiple x tau_c, where tau_c is the smallest lag beyond which the
/// Frobenius norm of C(t) stays below a noise floor estimated from the
/// largest lag decade. max_lag <= 0 selects horizon/8.
WSelection select_W(const EventStream& stream, double delta, double multiple = 5.0,
                    int n_lags = 32, double max_lag = 0.0);

} // namespace hawkes
