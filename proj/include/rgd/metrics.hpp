#pragma once

#include <rgd/diff_ops.hpp>

#include <cstdint>

namespace rgd {

/// |(grad u)_f| per face.
Eigen::VectorXd gradient_norm_field(const DiffOps& ops, const Eigen::VectorXd& u);

struct SymmetryStats
{
    double max = 0.0;
    double mean = 0.0;
};

/// Statistics of (1/sqrt(A)) |D(i,j) - D(j,i)| over pairs i < j.
SymmetryStats symmetry_error(const Eigen::MatrixXd& D, double area);

struct TriangleAudit
{
    double violation_pct = 0.0;
    /// Largest D(x,y) - D(x,z) - D(z,y) seen (length units, may be negative).
    double max_violation = 0.0;
    std::uint64_t triplets = 0;
    std::uint64_t violations = 0;
    bool exhaustive = false;
    double slack = 0.0;
};

inline constexpr Index kExhaustiveAuditLimit = 300;

enum class AuditMode {
    automatic, ///< exhaustive up to kExhaustiveAuditLimit vertices, sampled above
    sampled,
};

/// Triangle-inequality audit of the symmetrized matrix (D + D^T) / 2.
///
/// A triplet violates when D(x,y) > D(x,z) + D(z,y) + 1e-9 * max(D). For
/// n <= 300 every triplet of distinct vertices is tested (unless `mode` is
/// sampled); otherwise `sample_size` uniform triplets are drawn, in fixed-size chunks whose
/// generators are seeded from (seed, chunk index), so the result depends only
/// on the inputs and not on the worker count.
TriangleAudit triangle_audit(
    const Eigen::MatrixXd& D,
    std::uint64_t sample_size,
    std::uint64_t seed,
    AuditMode mode = AuditMode::automatic);

/// Per-vertex violation for the fixed pair (i, j):
/// max(D(i,j) - D(i,k) - D(k,j), 0) for every k, on the symmetrized matrix.
Eigen::VectorXd pair_violation(const Eigen::MatrixXd& D, Index i, Index j);

/// 100 * max|u - ref| / max(ref).
double max_error_vs(const Eigen::VectorXd& u, const Eigen::VectorXd& ref);

} // namespace rgd
