#include <rgd/error.hpp>
#include <rgd/line_field.hpp>

#include <Eigen/Geometry>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

namespace rgd {

namespace {

constexpr double kNormalTolerance = 1e-8;

Eigen::Matrix2d rotation(double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Eigen::Matrix2d R;
    R << c, -s, s, c;
    return R;
}

// doubled-angle map from face g's frame into face f's frame across edge (a, b)
Eigen::Matrix2d edge_transport(
    const Eigen::Vector3d& edge,
    const std::pair<Eigen::Vector3d, Eigen::Vector3d>& frame_f,
    const std::pair<Eigen::Vector3d, Eigen::Vector3d>& frame_g,
    bool consistent)
{
    const double theta_f = std::atan2(edge.dot(frame_f.second), edge.dot(frame_f.first));
    const double theta_g = std::atan2(edge.dot(frame_g.second), edge.dot(frame_g.first));
    if (consistent) return rotation(2.0 * (theta_f - theta_g));
    // orientations disagree, so angles measured from the edge change sign
    Eigen::Matrix2d reflect;
    reflect << 1.0, 0.0, 0.0, -1.0;
    return rotation(2.0 * theta_f) * reflect * rotation(-2.0 * theta_g);
}

} // namespace

std::vector<FieldConstraint> parse_constraints(std::istream& in)
{
    std::vector<FieldConstraint> out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
        std::istringstream ss(text);
        long long face = 0;
        if (!(ss >> face)) {
            std::string rest;
            ss.clear();
            if (ss >> rest) throw ParseError("expected 'face dx dy dz'", line);
            continue;
        }
        FieldConstraint c;
        if (!(ss >> c.direction(0) >> c.direction(1) >> c.direction(2))) {
            throw ParseError("expected 'face dx dy dz'", line);
        }
        std::string extra;
        if (ss >> extra) throw ParseError("trailing content after 'face dx dy dz'", line);
        if (face < 0) throw ParseError("negative face index", line);
        c.face = static_cast<Index>(face);
        out.push_back(c);
    }
    return out;
}

std::vector<FieldConstraint> read_constraints(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open constraints file " + path.string());
    return parse_constraints(in);
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> face_frame(const TriMesh& mesh, Index f)
{
    const Eigen::Vector3d p0 = mesh.position(mesh.faces()(f, 0));
    const Eigen::Vector3d p1 = mesh.position(mesh.faces()(f, 1));
    const Eigen::Vector3d e1 = (p1 - p0).normalized();
    const Eigen::Vector3d e2 = mesh.face_normal(f).cross(e1);
    return {e1, e2};
}

LineField interpolate_line_field(const TriMesh& mesh, std::span<const FieldConstraint> constraints)
{
    const Index m = mesh.num_faces();
    if (constraints.empty()) throw ValidationError("line field needs at least one constraint");

    std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> frames(m);
    for (Index f = 0; f < m; ++f) frames[f] = face_frame(mesh, f);

    // fixed doubled-angle vectors
    std::vector<bool> fixed(m, false);
    Eigen::MatrixX2d value = Eigen::MatrixX2d::Zero(m, 2);
    for (const auto& c : constraints) {
        if (c.face < 0 || c.face >= m) {
            throw ValidationError("constraint face " + std::to_string(c.face) + " out of range");
        }
        const double len = c.direction.norm();
        if (!(len > 0.0) || !std::isfinite(len)) {
            throw ValidationError("constraint on face " + std::to_string(c.face) + " has a zero direction");
        }
        const Eigen::Vector3d normal = mesh.face_normal(c.face);
        const Eigen::Vector3d tangent = c.direction - c.direction.dot(normal) * normal;
        if (tangent.norm() <= kNormalTolerance * len) {
            throw ValidationError("constraint on face " + std::to_string(c.face) + " is parallel to the face normal");
        }
        const auto& [e1, e2] = frames[c.face];
        const double phi = std::atan2(tangent.dot(e2), tangent.dot(e1));
        value.row(c.face) << std::cos(2.0 * phi), std::sin(2.0 * phi);
        fixed[c.face] = true;
    }

    // face adjacency through shared edges
    struct Incidence
    {
        Index face;
        bool forward;
    };
    std::map<std::pair<int, int>, std::vector<Incidence>> edges;
    const auto& F = mesh.faces();
    for (Index f = 0; f < m; ++f) {
        for (int k = 0; k < 3; ++k) {
            const int a = F(f, k);
            const int b = F(f, (k + 1) % 3);
            edges[{std::min(a, b), std::max(a, b)}].push_back({f, a < b});
        }
    }

    std::vector<Index> parent(m);
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    std::vector<Eigen::Triplet<double>> entries;
    auto add_block = [&](Index r, Index c, const Eigen::Matrix2d& B) {
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                if (B(i, j) != 0.0) entries.emplace_back(2 * r + i, 2 * c + j, B(i, j));
            }
        }
    };
    for (const auto& [key, inc] : edges) {
        const Eigen::Vector3d edge = (mesh.position(key.second) - mesh.position(key.first)).normalized();
        for (std::size_t s = 0; s + 1 < inc.size(); ++s) {
            const Index f = inc[s].face;
            const Index g = inc[s + 1].face;
            // consistent orientation traverses the shared edge in opposite directions
            const bool consistent = inc[s].forward != inc[s + 1].forward;
            const Eigen::Matrix2d T = edge_transport(edge, frames[f], frames[g], consistent);
            add_block(f, f, Eigen::Matrix2d::Identity());
            add_block(g, g, Eigen::Matrix2d::Identity());
            add_block(f, g, -T);
            add_block(g, f, -T.transpose());
            parent[find(f)] = find(g);
        }
    }

    std::vector<bool> anchored(m, false);
    for (Index f = 0; f < m; ++f) {
        if (fixed[f]) anchored[find(f)] = true;
    }
    for (Index f = 0; f < m; ++f) {
        if (!anchored[find(f)]) {
            throw ValidationError("face " + std::to_string(f) + " lies in a patch without field constraints");
        }
    }

    SparseMatrix K(2 * m, 2 * m);
    K.setFromTriplets(entries.begin(), entries.end());

    std::vector<Index> free_index(m, -1);
    Index nfree = 0;
    for (Index f = 0; f < m; ++f) {
        if (!fixed[f]) free_index[f] = nfree++;
    }
    if (nfree > 0) {
        std::vector<Eigen::Triplet<double>> reduced;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * nfree);
        for (Index col = 0; col < K.outerSize(); ++col) {
            const Index fc = col / 2;
            for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
                const Index fr = it.row() / 2;
                if (fixed[fr]) continue;
                const Index r = 2 * free_index[fr] + it.row() % 2;
                if (fixed[fc]) {
                    rhs(r) -= it.value() * value(fc, col % 2);
                } else {
                    reduced.emplace_back(r, 2 * free_index[fc] + col % 2, it.value());
                }
            }
        }
        SparseMatrix Kff(2 * nfree, 2 * nfree);
        Kff.setFromTriplets(reduced.begin(), reduced.end());
        Eigen::SimplicialLDLT<SparseMatrix> solver(Kff);
        if (solver.info() != Eigen::Success) throw FactorizationError("line field system factorization failed");
        const Eigen::VectorXd x = solver.solve(rhs);
        for (Index f = 0; f < m; ++f) {
            if (!fixed[f]) value.row(f) << x(2 * free_index[f]), x(2 * free_index[f] + 1);
        }
    }

    LineField field;
    field.directions.resize(m, 3);
    for (Index f = 0; f < m; ++f) {
        // a vanishing doubled-angle vector marks a singularity; any direction will do there
        const double phi = value.row(f).norm() > 0.0 ? 0.5 * std::atan2(value(f, 1), value(f, 0)) : 0.0;
        const auto& [e1, e2] = frames[f];
        field.directions.row(f) = (std::cos(phi) * e1 + std::sin(phi) * e2).transpose();
    }
    return field;
}

Eigen::MatrixX3d localize_field(
    const TriMesh& mesh,
    const LineField& field,
    const Eigen::VectorXd& vertex_distance,
    double sigma)
{
    if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
    if (field.directions.rows() != mesh.num_faces()) throw ValidationError("field does not match the mesh");
    if (vertex_distance.size() != mesh.num_vertices()) throw ValidationError("distance does not match the mesh");
    Eigen::MatrixX3d out = field.directions;
    const auto& F = mesh.faces();
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const double d = (vertex_distance(F(f, 0)) + vertex_distance(F(f, 1)) + vertex_distance(F(f, 2))) / 3.0;
        out.row(f) *= std::exp(-d * d / (2.0 * sigma * sigma));
    }
    return out;
}

Eigen::MatrixX3d localize_field(
    const TriMesh& mesh,
    const DiffOps& ops,
    const LineField& field,
    std::span<const Index> centers,
    double sigma,
    const AdmmSettings& settings)
{
    if (centers.empty()) throw ValidationError("localization needs at least one center");
    if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
    AdmmSettings plain = settings;
    plain.alpha_hat = 0.0;
    const DistanceField d = solve_fixed_source(ops, dirichlet_matrix(ops), centers, plain);
    return localize_field(mesh, field, d.u, sigma);
}

std::vector<Index> constraint_vertices(const TriMesh& mesh, std::span<const FieldConstraint> constraints)
{
    std::vector<Index> out;
    for (const auto& c : constraints) {
        if (c.face < 0 || c.face >= mesh.num_faces()) throw ValidationError("constraint face out of range");
        for (int k = 0; k < 3; ++k) out.push_back(mesh.faces()(c.face, k));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace rgd
