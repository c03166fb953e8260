#include <rgd/diff_ops.hpp>
#include <rgd/error.hpp>

#include <Eigen/Geometry>

#include <string>
#include <vector>

namespace rgd {

Eigen::VectorXd DiffOps::face_mass_diagonal() const
{
    Eigen::VectorXd d(grad_dim * num_faces());
    for (Index f = 0; f < num_faces(); ++f) d.segment(grad_dim * f, grad_dim).setConstant(face_areas(f));
    return d;
}

DiffOps build_ops(const TriMesh& mesh)
{
    const Index n = mesh.num_vertices();
    const Index m = mesh.num_faces();
    const auto& F = mesh.faces();

    DiffOps ops;
    ops.grad_dim = 3;
    ops.face_areas.resize(m);
    ops.vertex_areas = Eigen::VectorXd::Zero(n);

    std::vector<Eigen::Triplet<double>> grad_entries;
    std::vector<Eigen::Triplet<double>> lap_entries;
    grad_entries.reserve(9 * m);
    lap_entries.reserve(12 * m);

    for (Index f = 0; f < m; ++f) {
        const int idx[3] = {F(f, 0), F(f, 1), F(f, 2)};
        const Eigen::Vector3d p[3] = {mesh.position(idx[0]), mesh.position(idx[1]), mesh.position(idx[2])};
        const Eigen::Vector3d cross = (p[1] - p[0]).cross(p[2] - p[0]);
        const double twice_area = cross.norm();
        if (!(twice_area > 0.0)) {
            throw ValidationError("degenerate face " + std::to_string(f) + " during operator assembly");
        }
        const Eigen::Vector3d normal = cross / twice_area;
        const double area = 0.5 * twice_area;
        ops.face_areas(f) = area;

        for (int c = 0; c < 3; ++c) {
            // gradient of the hat function at corner c: N x (opposite edge) / (2 area)
            const Eigen::Vector3d edge = p[(c + 2) % 3] - p[(c + 1) % 3];
            const Eigen::Vector3d g = normal.cross(edge) / twice_area;
            for (int k = 0; k < 3; ++k) grad_entries.emplace_back(3 * f + k, idx[c], g(k));
            ops.vertex_areas(idx[c]) += area / 3.0;

            // cotangent of the angle at corner c weights the opposite edge
            const Eigen::Vector3d a = p[(c + 1) % 3] - p[c];
            const Eigen::Vector3d b = p[(c + 2) % 3] - p[c];
            const double cot = a.dot(b) / a.cross(b).norm();
            const int i = idx[(c + 1) % 3];
            const int j = idx[(c + 2) % 3];
            const double w = 0.5 * cot;
            lap_entries.emplace_back(i, j, -w);
            lap_entries.emplace_back(j, i, -w);
            lap_entries.emplace_back(i, i, w);
            lap_entries.emplace_back(j, j, w);
        }
    }

    ops.grad.resize(3 * m, n);
    ops.grad.setFromTriplets(grad_entries.begin(), grad_entries.end());
    ops.laplacian.resize(n, n);
    ops.laplacian.setFromTriplets(lap_entries.begin(), lap_entries.end());

    ops.div = SparseMatrix(ops.grad.transpose()) * ops.face_mass_diagonal().asDiagonal();
    ops.total_area = ops.face_areas.sum();
    return ops;
}

Eigen::MatrixXd face_gradients(const DiffOps& ops, const Eigen::VectorXd& u)
{
    const Eigen::VectorXd g = ops.grad * u;
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        g.data(), ops.num_faces(), ops.grad_dim);
}

} // namespace rgd
