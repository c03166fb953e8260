#pragma once

#include <rgd/admm.hpp>
#include <rgd/diff_ops.hpp>

namespace rgd {

struct AllPairsSettings
{
    double alpha_hat = 0.0;
    AlphaMode alpha_mode = AlphaMode::scale_invariant;
    double rho1 = 2.0;
    double rho2 = 2.0;
    double eps_abs = 1e-6;
    double eps_rel = 2e-4;
    int max_iter = 10000;
    /// Applied to the gradient splittings only; 1 disables it.
    double over_relaxation = 1.0;
    /// Largest vertex count accepted (dense n x n state).
    Index cap = 5000;
    /// Iterations between checks that the row copy R still mirrors X.
    int mirror_check_interval = 50;

    void validate() const;
};

struct DistanceMatrix
{
    /// Consensus variable: zero diagonal, non-negative, symmetric.
    Eigen::MatrixXd D;
    int iterations = 0;
    bool converged = false;
    double alpha = 0.0;
    int factorizations = 0;
    /// Largest ||R - X||_inf / max(1, max|X|) seen at the periodic checks.
    double max_mirror_gap = 0.0;
    int mirror_checks = 0;
    /// max over the residual tests of residual / tolerance, per iteration.
    std::vector<double> residual_ratio;
};

/// max((mu + nu^T) / (2 rho2 / sqrt(A)) + (X + R^T) / 2, 0) with the diagonal zeroed.
Eigen::MatrixXd consensus_update(
    const Eigen::MatrixXd& X,
    const Eigen::MatrixXd& R,
    const Eigen::MatrixXd& mu,
    const Eigen::MatrixXd& nu,
    double rho2,
    double area);

/// Symmetric all-pairs regularized distance (Dirichlet energy) by consensus
/// ADMM over a column copy X and a row copy R of the distance matrix.
///
/// Both copies are solved column by column against one factorization of
/// (alpha + rho1 sqrt(A)) W_D + rho2 / sqrt(A) M_V. Columns are distributed
/// over RGD_THREADS workers; every reduction runs in column order, so the
/// result does not depend on the worker count. Throws ValidationError when n
/// exceeds the cap.
DistanceMatrix solve_all_pairs(const DiffOps& ops, const AllPairsSettings& settings);

} // namespace rgd
