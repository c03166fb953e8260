#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <vector>

namespace rgd {

using Index = Eigen::Index;

/// Triangle mesh: vertex positions (n x 3) and faces (m x 3, 0-based).
///
/// Construction validates indices, finiteness and a degeneracy floor of
/// 1e-12 times the mean face area. Manifoldness is not required.
class TriMesh
{
public:
    TriMesh() = default;
    TriMesh(Eigen::MatrixX3d vertices, Eigen::MatrixX3i faces);

    const Eigen::MatrixX3d& vertices() const { return m_vertices; }
    const Eigen::MatrixX3i& faces() const { return m_faces; }

    Index num_vertices() const { return m_vertices.rows(); }
    Index num_faces() const { return m_faces.rows(); }

    Eigen::Vector3d position(Index v) const { return m_vertices.row(v).transpose(); }
    Eigen::Vector3d face_normal(Index f) const;
    double face_area(Index f) const;

private:
    Eigen::MatrixX3d m_vertices;
    Eigen::MatrixX3i m_faces;
};

/// Reads an OBJ (1-based "v"/"f" records) or OFF file.
TriMesh load_mesh(const std::filesystem::path& path);
TriMesh parse_obj(std::istream& in);
TriMesh parse_off(std::istream& in);

/// Max pairwise Euclidean vertex distance. O(n^2).
double mesh_diameter(const TriMesh& mesh);

TriMesh mesh_scale(const TriMesh& mesh, double s);

/// Vertices incident to an edge that has exactly one adjacent face.
std::vector<Index> boundary_vertices(const TriMesh& mesh);

/// Connected component label per vertex (vertices linked through faces).
std::vector<Index> vertex_components(const TriMesh& mesh, Index* count = nullptr);

} // namespace rgd
