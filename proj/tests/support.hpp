#pragma once

#include <rgd/mesh.hpp>

#include <Eigen/QR>
#include <Eigen/SparseCore>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace rgd::test {

inline TriMesh single_triangle(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c)
{
    Eigen::MatrixX3d V(3, 3);
    V.row(0) = a.transpose();
    V.row(1) = b.transpose();
    V.row(2) = c.transpose();
    Eigen::MatrixX3i F(1, 3);
    F << 0, 1, 2;
    return TriMesh(V, F);
}

inline TriMesh equilateral_triangle()
{
    return single_triangle({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0});
}

/// Strip of `cells` unit squares along x, width `height`, two triangles each.
inline TriMesh strip(int cells, double height = 1.0)
{
    Eigen::MatrixX3d V(2 * (cells + 1), 3);
    for (int i = 0; i <= cells; ++i) {
        V.row(2 * i) << i, 0, 0;
        V.row(2 * i + 1) << i, height, 0;
    }
    Eigen::MatrixX3i F(2 * cells, 3);
    for (int i = 0; i < cells; ++i) {
        F.row(2 * i) << 2 * i, 2 * i + 2, 2 * i + 3;
        F.row(2 * i + 1) << 2 * i, 2 * i + 3, 2 * i + 1;
    }
    return TriMesh(V, F);
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Eigen::Matrix3d A;
    for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = g(rng);
    Eigen::HouseholderQR<Eigen::Matrix3d> qr(A);
    Eigen::Matrix3d Q = qr.householderQ();
    if (Q.determinant() < 0) Q.col(0) *= -1.0;
    return Q;
}

inline TriMesh rigid_motion(const TriMesh& mesh, const Eigen::Matrix3d& R, const Eigen::Vector3d& t)
{
    Eigen::MatrixX3d V = (mesh.vertices() * R.transpose()).rowwise() + t.transpose();
    return TriMesh(V, mesh.faces());
}

inline double max_abs(const Eigen::SparseMatrix<double>& A)
{
    double best = 0.0;
    for (Eigen::Index k = 0; k < A.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) best = std::max(best, std::abs(it.value()));
    }
    return best;
}

inline double max_abs_diff(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& B)
{
    return max_abs(Eigen::SparseMatrix<double>(A - B));
}

inline bool bitwise_equal(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& B)
{
    if (A.rows() != B.rows() || A.cols() != B.cols() || A.nonZeros() != B.nonZeros()) return false;
    Eigen::SparseMatrix<double> a = A, b = B;
    a.makeCompressed();
    b.makeCompressed();
    for (Eigen::Index k = 0; k <= a.outerSize(); ++k) {
        if (a.outerIndexPtr()[k] != b.outerIndexPtr()[k]) return false;
    }
    for (Eigen::Index k = 0; k < a.nonZeros(); ++k) {
        if (a.innerIndexPtr()[k] != b.innerIndexPtr()[k]) return false;
        if (std::memcmp(&a.valuePtr()[k], &b.valuePtr()[k], sizeof(double)) != 0) return false;
    }
    return true;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("rgd_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
}

/// Constant direction v projected into each face plane.
inline Eigen::MatrixX3d uniform_field(const TriMesh& mesh, const Eigen::Vector3d& v)
{
    Eigen::MatrixX3d field(mesh.num_faces(), 3);
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const Eigen::Vector3d n = mesh.face_normal(f);
        field.row(f) = (v - v.dot(n) * n).normalized().transpose();
    }
    return field;
}

inline void write_obj(const std::filesystem::path& path, const TriMesh& mesh)
{
    std::ofstream out(path);
    out.precision(17);
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        const Eigen::Vector3d p = mesh.position(v);
        out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    }
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        out << "f " << mesh.faces()(f, 0) + 1 << ' ' << mesh.faces()(f, 1) + 1 << ' ' << mesh.faces()(f, 2) + 1 << '\n';
    }
}

/// Sets RGD_THREADS for the lifetime of the object.
class ThreadsEnv
{
public:
    explicit ThreadsEnv(int n)
    {
        if (const char* old = std::getenv("RGD_THREADS")) m_old = old;
        setenv("RGD_THREADS", std::to_string(n).c_str(), 1);
    }
    ~ThreadsEnv()
    {
        if (m_old.empty()) {
            unsetenv("RGD_THREADS");
        } else {
            setenv("RGD_THREADS", m_old.c_str(), 1);
        }
    }

private:
    std::string m_old;
};

} // namespace rgd::test
