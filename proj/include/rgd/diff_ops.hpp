#pragma once

#include <rgd/mesh.hpp>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace rgd {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Sparse differential operators on a simplicial discretization.
///
/// Functions are per-vertex (length n); gradients are constant per element
/// and stored as `grad_dim` consecutive entries per element, so `grad` is
/// (grad_dim * m) x n. Triangle meshes use grad_dim = 3 (ambient basis);
/// the 1D ring oracle reuses the same layout with grad_dim = 1.
///
/// Conventions:
///   div       = grad^T * mass_F
///   laplacian = div * grad   (positive semi-definite)
struct DiffOps
{
    int grad_dim = 3;
    SparseMatrix grad;
    SparseMatrix div;
    SparseMatrix laplacian;
    Eigen::VectorXd vertex_areas;
    Eigen::VectorXd face_areas;
    double total_area = 0.0;

    Index num_vertices() const { return vertex_areas.size(); }
    Index num_faces() const { return face_areas.size(); }

    /// Diagonal of mass_F: each face area repeated grad_dim times.
    Eigen::VectorXd face_mass_diagonal() const;
};

/// Assembles gradient, divergence, cotangent Laplacian and area measures.
///
/// The Laplacian is built from cotangent weights independently of grad, so
/// that `laplacian == div * grad` is a meaningful consistency check.
DiffOps build_ops(const TriMesh& mesh);

/// Per-face gradients of a vertex function, as an m x grad_dim matrix.
Eigen::MatrixXd face_gradients(const DiffOps& ops, const Eigen::VectorXd& u);

} // namespace rgd
