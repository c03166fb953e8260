#include <rgd/error.hpp>
#include <rgd/mesh_gen.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace rgd {

namespace {

void zip_rings(
    std::vector<Eigen::Vector3i>& faces,
    int inner_start,
    int inner_count,
    int outer_start,
    int outer_count)
{
    auto inner_angle = [&](int i) { return 2.0 * std::numbers::pi * i / inner_count; };
    auto outer_angle = [&](int j) { return 2.0 * std::numbers::pi * j / outer_count; };
    auto inner = [&](int i) { return inner_start + i % inner_count; };
    auto outer = [&](int j) { return outer_start + j % outer_count; };
    int i = 0;
    int j = 0;
    while (i < inner_count || j < outer_count) {
        const bool advance_outer =
            j < outer_count && (i == inner_count || outer_angle(j + 1) <= inner_angle(i + 1) + 1e-12);
        if (advance_outer) {
            faces.emplace_back(inner(i), outer(j), outer(j + 1));
            ++j;
        } else {
            faces.emplace_back(inner(i), outer(j), inner(i + 1));
            ++i;
        }
    }
}

TriMesh assemble(const std::vector<Eigen::Vector3d>& verts, const std::vector<Eigen::Vector3i>& faces)
{
    Eigen::MatrixX3d V(verts.size(), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) V.row(i) = verts[i].transpose();
    Eigen::MatrixX3i F(faces.size(), 3);
    for (std::size_t f = 0; f < faces.size(); ++f) F.row(f) = faces[f].transpose();
    return TriMesh(std::move(V), std::move(F));
}

} // namespace

TriMesh make_disk(double radius, int rings)
{
    if (rings < 1 || !(radius > 0.0)) throw ValidationError("make_disk needs radius > 0 and rings >= 1");
    std::vector<Eigen::Vector3d> verts{Eigen::Vector3d::Zero()};
    std::vector<Eigen::Vector3i> faces;
    int prev_start = 0;
    int prev_count = 1;
    for (int k = 1; k <= rings; ++k) {
        const int count = 6 * k;
        const int start = static_cast<int>(verts.size());
        const double r = radius * k / rings;
        for (int j = 0; j < count; ++j) {
            const double t = 2.0 * std::numbers::pi * j / count;
            verts.emplace_back(r * std::cos(t), r * std::sin(t), 0.0);
        }
        if (k == 1) {
            for (int j = 0; j < count; ++j) faces.emplace_back(0, start + j, start + (j + 1) % count);
        } else {
            zip_rings(faces, prev_start, prev_count, start, count);
        }
        prev_start = start;
        prev_count = count;
    }
    return assemble(verts, faces);
}

TriMesh make_grid(double width, double height, int nx, int ny)
{
    if (nx < 1 || ny < 1) throw ValidationError("make_grid needs at least one cell per axis");
    std::vector<Eigen::Vector3d> verts;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) verts.emplace_back(width * i / nx, height * j / ny, 0.0);
    }
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<Eigen::Vector3i> faces;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if ((i + j) % 2 == 0) {
                faces.emplace_back(a, b, c);
                faces.emplace_back(a, c, d);
            } else {
                faces.emplace_back(a, b, d);
                faces.emplace_back(b, c, d);
            }
        }
    }
    return assemble(verts, faces);
}

TriMesh make_random_surface(std::uint64_t seed, int nx, int ny, double jitter, double amplitude)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    TriMesh grid = make_grid(1.0, 1.0, nx, ny);
    Eigen::MatrixX3d V = grid.vertices();

    struct Wave { double kx, ky, phase, weight; };
    std::vector<Wave> waves(4);
    for (auto& w : waves) {
        w = {3.0 * unit(rng), 3.0 * unit(rng), std::numbers::pi * unit(rng), unit(rng)};
    }
    const double hx = 1.0 / nx;
    const double hy = 1.0 / ny;
    for (Index v = 0; v < V.rows(); ++v) {
        const int i = static_cast<int>(v % (nx + 1));
        const int j = static_cast<int>(v / (nx + 1));
        if (i > 0 && i < nx) V(v, 0) += jitter * hx * unit(rng);
        if (j > 0 && j < ny) V(v, 1) += jitter * hy * unit(rng);
        double z = 0.0;
        for (const auto& w : waves) z += w.weight * std::sin(w.kx * V(v, 0) + w.ky * V(v, 1) + w.phase);
        V(v, 2) = amplitude * z;
    }
    return TriMesh(std::move(V), grid.faces());
}

} // namespace rgd
