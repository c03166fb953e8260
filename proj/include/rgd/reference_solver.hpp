#pragma once

#include <rgd/diff_ops.hpp>
#include <rgd/regularizers.hpp>

#include <span>

namespace rgd {

struct ReferenceSettings
{
    /// Optimality tolerance (see reference_solve).
    double tol = 1e-8;
    int max_iter = 2000000;
    int check_interval = 50;
    /// Largest vertex count accepted.
    Index max_vertices = 500;
};

struct ReferenceResult
{
    Eigen::VectorXd u;
    /// Per-face multipliers of the gradient constraints, 3 per face.
    Eigen::VectorXd p;
    int iterations = 0;
    double stationarity = 0.0;
    double infeasibility = 0.0;
    double complementarity = 0.0;
};

/// Independent solver for
///   min -A_V^T u + alpha/2 u^T W u  s.t. |(grad u)_f| <= 1, u_E <= 0
/// by a diagonally preconditioned primal-dual method (Condat-Vu). It uses only
/// sparse products, per-face shrinkage and the clamp on E; no linear solves.
///
/// Stops when, at once: max_f (|(grad u)_f| - 1)_+ <= tol; the stationarity
/// residual on free vertices is <= tol * max A_V; and the complementarity gap
/// sum_f (|p_f| - <p_f, (grad u)_f>) is <= tol * A. Throws std::runtime_error
/// when the iteration cap is hit first.
ReferenceResult reference_solve(
    const DiffOps& ops,
    const SparseMatrix& W,
    std::span<const Index> sources,
    double alpha,
    const ReferenceSettings& settings = {});

} // namespace rgd
