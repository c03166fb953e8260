#pragma once

#include <rgd/admm.hpp>
#include <rgd/diff_ops.hpp>
#include <rgd/mesh.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace rgd {

/// One tangent line per face (rows), unit length, defined up to sign.
struct LineField
{
    Eigen::MatrixX3d directions;
};

struct FieldConstraint
{
    Index face = 0;
    Eigen::Vector3d direction = Eigen::Vector3d::Zero();
};

/// "face dx dy dz" per line, '#' comments allowed.
std::vector<FieldConstraint> parse_constraints(std::istream& in);
std::vector<FieldConstraint> read_constraints(const std::filesystem::path& path);

/// Orthonormal tangent frame (e1, e2) of a face: e1 along its first edge.
std::pair<Eigen::Vector3d, Eigen::Vector3d> face_frame(const TriMesh& mesh, Index f);

/// Smooth line field through sparse constraints.
///
/// Each line is encoded by its doubled angle in the face frame, so opposite
/// directions coincide. The doubled-angle unit vectors are interpolated
/// harmonically on the face adjacency graph (uniform weights), carrying the
/// frame across each shared edge, and the angle is halved at the end. Later
/// constraints on the same face override earlier ones.
///
/// Throws if there are no constraints, a direction is zero or normal to its
/// face, or a connected patch of faces holds no constraint.
LineField interpolate_line_field(const TriMesh& mesh, std::span<const FieldConstraint> constraints);

/// Scales each face's line by exp(-d_f^2 / (2 sigma^2)), d_f being the mean of
/// the face's vertex values of `vertex_distance`.
Eigen::MatrixX3d localize_field(
    const TriMesh& mesh,
    const LineField& field,
    const Eigen::VectorXd& vertex_distance,
    double sigma);

/// Same, with the distance to `centers` computed by the unregularized solver.
Eigen::MatrixX3d localize_field(
    const TriMesh& mesh,
    const DiffOps& ops,
    const LineField& field,
    std::span<const Index> centers,
    double sigma,
    const AdmmSettings& settings = {});

/// Distinct vertices of the constrained faces; the default localization centers.
std::vector<Index> constraint_vertices(const TriMesh& mesh, std::span<const FieldConstraint> constraints);

} // namespace rgd
