#pragma once

#include <rgd/admm.hpp>
#include <rgd/diff_ops.hpp>

namespace rgd {

/// Closed-form Dirichlet-regularized distance on the unit circle from x = 0.
///
/// Piecewise on x mod 2pi: linear on [0, L], concave parabola on [L, 2pi - L],
/// linear on [2pi - L, 2pi), with L = max(pi - alpha, 0). The function is C1
/// at both interfaces. For alpha >= pi this returns the alpha = pi profile.
double circle_dirichlet_exact(double x, double alpha);

/// Closed-form 1D Hessian-regularized distance with c = cbrt(3 alpha).
/// Throws ValidationError when c >= pi (the formula's regime ends there).
double circle_hessian_exact(double x, double alpha);

/// Dirichlet-regularized distance to the boundary of a flat disk of radius R,
/// at radius r. Requires 0 < 2 alpha < R.
double disk_exact(double r, double alpha, double R);

/// Largest u(x - y) - u(x - z) - u(z - y) over all grid triplets of an
/// N-point uniform grid on the circle, with u = circle_dirichlet_exact.
double circle_metric_check(double alpha, int N);

/// Uniform N-sample discretization of the circle. Edges (i, i+1 mod N) play the
/// role of faces, with scalar forward-difference gradients and edge measure h.
struct Ring1D
{
    int samples = 0;
    double spacing = 0.0;
    DiffOps ops;

    /// Bilaplacian L M^-1 L with the rows of L at `source` dropped, i.e. the
    /// second-derivative energy over the open interval away from the source.
    SparseMatrix bilaplacian_excluding(Index source) const;

    /// Arc position of sample i measured from `source`, in [0, 2pi).
    double position(Index i, Index source) const;
};

Ring1D make_ring(int samples);

enum class RingKind { dirichlet, bilaplacian };

/// Ring solves are cheap, so the oracle runs them to eps_abs 1e-10,
/// eps_rel 1e-8, far enough that the mesh width dominates the error.
AdmmSettings ring_oracle_settings();

/// Runs the fixed-source ADMM on the ring with a raw (unscaled) alpha.
/// `base` supplies the ADMM tolerances; its alpha fields are overridden.
DistanceField solve_ring_1d(
    int samples,
    double alpha,
    RingKind kind,
    Index source,
    const AdmmSettings& base = {});

/// Max |u_i - exact(x_i)| over the samples. alpha = 0 compares against the
/// plain arc distance min(x, 2pi - x).
double ring_max_error(const Ring1D& ring, const Eigen::VectorXd& u, double alpha, RingKind kind, Index source);

/// Sup-norm error of the piecewise-linear interpolant of u against the exact
/// profile, evaluated at `samples_per_edge` equispaced points per edge.
///
/// On even N the nodal values of the Dirichlet ring solution coincide with the
/// exact profile, so this is the error measure that sees the mesh width.
double ring_sup_error(
    const Ring1D& ring,
    const Eigen::VectorXd& u,
    double alpha,
    RingKind kind,
    Index source,
    int samples_per_edge = 32);

} // namespace rgd
