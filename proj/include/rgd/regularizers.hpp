#pragma once

#include <rgd/diff_ops.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace rgd {

enum class RegularizerKind { dirichlet, vfa, bilaplacian, external };

std::string to_string(RegularizerKind kind);

/// Symmetric PSD matrix W of the smoothness energy 0.5 * u^T W u.
///
/// `scale_exponent` e sets the scale-invariant weight: alpha = alpha_hat * A^e
/// (1/2 for first-order energies, 3/2 for Hessian-type energies).
struct RegularizerMatrix
{
    SparseMatrix W;
    RegularizerKind kind = RegularizerKind::dirichlet;
    double scale_exponent = 0.5;
};

inline constexpr double kFirstOrderExponent = 0.5;
inline constexpr double kHessianExponent = 1.5;

/// W = cotangent Laplacian.
RegularizerMatrix dirichlet_matrix(const DiffOps& ops);

/// Anisotropic energy |grad u|^2 + beta <V, grad u>^2 per face.
///
/// `field` holds one 3-vector per face (rows); it need not be unit length, so a
/// localized (Gaussian-scaled) field can be passed directly. Assembled as
/// W_D + beta * div * blockdiag(V V^T) * grad, which equals
/// div * (I + beta * V V^T) * grad and is bitwise W_D at beta = 0.
RegularizerMatrix vfa_matrix(const DiffOps& ops, const Eigen::MatrixX3d& field, double beta);

/// W = L * M_V^{-1} * L, a flat stand-in for the Hessian energy.
RegularizerMatrix bilaplacian_matrix(const DiffOps& ops);

/// Reads "i j value" lines (0-based, duplicates summed) into an n x n matrix.
/// Rejects out-of-range indices and asymmetry beyond 1e-8 (relative).
RegularizerMatrix external_matrix(
    const std::filesystem::path& path,
    Index n,
    double scale_exponent = kHessianExponent);
RegularizerMatrix parse_external_matrix(std::istream& in, Index n, double scale_exponent);

} // namespace rgd
