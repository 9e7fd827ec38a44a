#include "hawkes/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hawkes {

namespace {

void check_square(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("matrix must be square");
    if (!M.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym_eig(const Eigen::MatrixXd& M) {
    // explicit symmetrization kills round-off asymmetry before the solver
    const Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symmetric eigendecomposition failed");
    return es;
}

} // namespace

SymmetrizeResult symmetrize(const Eigen::MatrixXd& H) {
    check_square(H);
    SymmetrizeResult r;
    r.A = 0.5 * (H + H.transpose());
    const double sym = r.A.norm();
    const double anti = (0.5 * (H - H.transpose())).norm();
    if (sym > 0.0) r.antisym_ratio = anti / sym;
    else r.antisym_ratio = anti > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return r;
}

Eigen::MatrixXd signed_laplacian(const Eigen::MatrixXd& A) {
    check_square(A);
    Eigen::MatrixXd L = -A;
    for (int i = 0; i < A.rows(); ++i)
        L(i, i) += A.row(i).cwiseAbs().sum();
    return L;
}

Eigen::MatrixXd nearest_spd(const Eigen::MatrixXd& M, double eps) {
    check_square(M);
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    auto es = sym_eig(M);
    const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(eps);
    return es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
}

double default_spd_floor(const Eigen::MatrixXd& Lbar, double rel) {
    const double scale = Lbar.diagonal().cwiseAbs().mean();
    const double floor = rel * scale;
    return floor > 0.0 ? floor : 1e-8;
}

Eigen::MatrixXd spd_log(const Eigen::MatrixXd& X) {
    auto es = sym_eig(X);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("matrix log requires a positive definite input");
    const Eigen::VectorXd l = es.eigenvalues().array().log();
    return es.eigenvectors() * l.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd spd_exp(const Eigen::MatrixXd& S) {
    auto es = sym_eig(S);
    const Eigen::VectorXd l = es.eigenvalues().array().exp();
    return es.eigenvectors() * l.asDiagonal() * es.eigenvectors().transpose();
}

double le_distance(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    return (spd_log(X) - spd_log(Y)).norm();
}

Eigen::MatrixXd frechet_mean(std::span<const Eigen::MatrixXd> spd) {
    if (spd.empty()) throw std::invalid_argument("empty sequence");
    Eigen::MatrixXd acc = spd_log(spd[0]);
    for (std::size_t i = 1; i < spd.size(); ++i) acc += spd_log(spd[i]);
    return spd_exp(acc / static_cast<double>(spd.size()));
}

double frechet_variance(std::span<const Eigen::MatrixXd> spd,
                        const Eigen::MatrixXd& mean) {
    if (spd.empty()) throw std::invalid_argument("empty sequence");
    const Eigen::MatrixXd log_mean = spd_log(mean);
    double acc = 0.0;
    for (const auto& X : spd) acc += (spd_log(X) - log_mean).squaredNorm();
    return acc / static_cast<double>(spd.size());
}

CausalSnapshot CausalSnapshot::from_kernel(int window_index, const Eigen::MatrixXd& H,
                                           double eps_rel) {
    CausalSnapshot snap;
    snap.window_index = window_index;
    auto sym = symmetrize(H);
    snap.A = std::move(sym.A);
    snap.antisym_ratio = sym.antisym_ratio;
    snap.Lbar = signed_laplacian(snap.A);
    snap.eps = default_spd_floor(snap.Lbar, eps_rel);
    auto es = sym_eig(snap.Lbar);
    snap.floored = es.eigenvalues().minCoeff() < snap.eps;
    const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(snap.eps);
    snap.Ltilde =
        es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    const Eigen::VectorXd logs = clamped.array().log();
    snap.logL = es.eigenvectors() * logs.asDiagonal() * es.eigenvectors().transpose();
    return snap;
}

} // namespace hawkes
