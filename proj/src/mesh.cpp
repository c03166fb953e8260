#include <rgd/error.hpp>
#include <rgd/mesh.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>

namespace rgd {

namespace {

constexpr double kDegeneracyFloor = 1e-12;

std::string lowercase_extension(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return ext;
}

double parse_double(const std::string& token, std::size_t line)
{
    try {
        std::size_t used = 0;
        double value = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + token + "'", line);
    }
}

long parse_long(const std::string& token, std::size_t line)
{
    try {
        std::size_t used = 0;
        long value = std::stol(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + token + "'", line);
    }
}

// Whitespace tokenizer that tracks line numbers and skips '#' comments.
class TokenStream
{
public:
    explicit TokenStream(std::istream& in)
        : m_in(in)
    {}

    bool next(std::string& token)
    {
        while (m_pos >= m_tokens.size()) {
            std::string text;
            if (!std::getline(m_in, text)) return false;
            ++m_line;
            if (auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
            std::istringstream ss(text);
            m_tokens.clear();
            m_pos = 0;
            for (std::string t; ss >> t;) m_tokens.push_back(t);
        }
        token = m_tokens[m_pos++];
        return true;
    }

    std::string expect(const char* what)
    {
        std::string token;
        if (!next(token)) throw ParseError(std::string("unexpected end of file, expected ") + what, m_line);
        return token;
    }

    std::size_t line() const { return m_line; }

    void skip_rest_of_line() { m_pos = m_tokens.size(); }

private:
    std::istream& m_in;
    std::vector<std::string> m_tokens;
    std::size_t m_pos = 0;
    std::size_t m_line = 0;
};

} // namespace

TriMesh::TriMesh(Eigen::MatrixX3d vertices, Eigen::MatrixX3i faces)
    : m_vertices(std::move(vertices))
    , m_faces(std::move(faces))
{
    const Index n = num_vertices();
    if (!m_vertices.allFinite()) throw ValidationError("mesh has non-finite vertex coordinates");
    for (Index f = 0; f < num_faces(); ++f) {
        const auto face = m_faces.row(f);
        for (int c = 0; c < 3; ++c) {
            if (face(c) < 0 || face(c) >= n) {
                throw ValidationError(
                    "face " + std::to_string(f) + " references vertex " + std::to_string(face(c))
                    + " outside [0, " + std::to_string(n) + ")");
            }
        }
        if (face(0) == face(1) || face(1) == face(2) || face(0) == face(2)) {
            throw ValidationError("face " + std::to_string(f) + " repeats a vertex index");
        }
    }
    if (num_faces() == 0) return;

    Eigen::VectorXd areas(num_faces());
    for (Index f = 0; f < num_faces(); ++f) areas(f) = face_area(f);
    const double floor = kDegeneracyFloor * areas.mean();
    std::vector<Index> degenerate;
    for (Index f = 0; f < num_faces(); ++f) {
        if (!(areas(f) > floor)) degenerate.push_back(f);
    }
    if (!degenerate.empty()) {
        std::string msg = "degenerate faces (area below 1e-12 x mean):";
        for (std::size_t i = 0; i < degenerate.size() && i < 20; ++i) {
            msg += " " + std::to_string(degenerate[i]);
        }
        if (degenerate.size() > 20) msg += " ... (" + std::to_string(degenerate.size()) + " total)";
        throw ValidationError(msg);
    }
}

Eigen::Vector3d TriMesh::face_normal(Index f) const
{
    const Eigen::Vector3d p0 = position(m_faces(f, 0));
    const Eigen::Vector3d p1 = position(m_faces(f, 1));
    const Eigen::Vector3d p2 = position(m_faces(f, 2));
    return (p1 - p0).cross(p2 - p0).normalized();
}

double TriMesh::face_area(Index f) const
{
    const Eigen::Vector3d p0 = position(m_faces(f, 0));
    const Eigen::Vector3d p1 = position(m_faces(f, 1));
    const Eigen::Vector3d p2 = position(m_faces(f, 2));
    return 0.5 * (p1 - p0).cross(p2 - p0).norm();
}

TriMesh parse_obj(std::istream& in)
{
    std::vector<Eigen::Vector3d> verts;
    std::vector<std::array<long, 3>> faces;
    std::vector<std::size_t> face_lines;

    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
        std::istringstream ss(text);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            Eigen::Vector3d p;
            for (int c = 0; c < 3; ++c) {
                std::string tok;
                if (!(ss >> tok)) throw ParseError("vertex record needs 3 coordinates", line);
                p(c) = parse_double(tok, line);
            }
            verts.push_back(p);
        } else if (tag == "f") {
            std::vector<long> idx;
            for (std::string tok; ss >> tok;) {
                // "a", "a/b", "a//c", "a/b/c": only the position index matters
                const std::string head = tok.substr(0, tok.find('/'));
                long value = parse_long(head, line);
                if (value == 0) throw ParseError("OBJ indices are 1-based; found index 0", line);
                if (value < 0) value = static_cast<long>(verts.size()) + value + 1;
                idx.push_back(value - 1);
            }
            if (idx.size() != 3) {
                throw ParseError(
                    "only triangle faces are supported, found " + std::to_string(idx.size())
                        + " vertices",
                    line);
            }
            faces.push_back({idx[0], idx[1], idx[2]});
            face_lines.push_back(line);
        }
    }

    const auto n = static_cast<long>(verts.size());
    Eigen::MatrixX3d V(verts.size(), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) V.row(i) = verts[i].transpose();
    Eigen::MatrixX3i F(faces.size(), 3);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int c = 0; c < 3; ++c) {
            if (faces[f][c] < 0 || faces[f][c] >= n) {
                throw ParseError("face references a vertex that does not exist", face_lines[f]);
            }
            F(f, c) = static_cast<int>(faces[f][c]);
        }
    }
    return TriMesh(std::move(V), std::move(F));
}

TriMesh parse_off(std::istream& in)
{
    TokenStream ts(in);
    std::string header = ts.expect("OFF header");
    if (header != "OFF") throw ParseError("missing OFF header", ts.line());

    const long nv = parse_long(ts.expect("vertex count"), ts.line());
    const long nf = parse_long(ts.expect("face count"), ts.line());
    parse_long(ts.expect("edge count"), ts.line());
    ts.skip_rest_of_line();
    if (nv < 0 || nf < 0) throw ParseError("negative element count", ts.line());

    Eigen::MatrixX3d V(nv, 3);
    for (long i = 0; i < nv; ++i) {
        for (int c = 0; c < 3; ++c) V(i, c) = parse_double(ts.expect("coordinate"), ts.line());
        ts.skip_rest_of_line();
    }
    Eigen::MatrixX3i F(nf, 3);
    for (long f = 0; f < nf; ++f) {
        const long count = parse_long(ts.expect("face size"), ts.line());
        const std::size_t line = ts.line();
        if (count != 3) {
            throw ParseError(
                "only triangle faces are supported, found " + std::to_string(count) + " vertices",
                line);
        }
        for (int c = 0; c < 3; ++c) {
            const long v = parse_long(ts.expect("face index"), line);
            if (v < 0 || v >= nv) throw ParseError("face index out of range", line);
            F(f, c) = static_cast<int>(v);
        }
        // optional per-face color values
        ts.skip_rest_of_line();
    }
    return TriMesh(std::move(V), std::move(F));
}

TriMesh load_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open mesh file " + path.string());
    const std::string ext = lowercase_extension(path);
    if (ext == ".obj") return parse_obj(in);
    if (ext == ".off") return parse_off(in);
    throw ValidationError("unsupported mesh extension '" + ext + "' (expected .obj or .off)");
}

double mesh_diameter(const TriMesh& mesh)
{
    const auto& V = mesh.vertices();
    double best = 0.0;
    for (Index i = 0; i < V.rows(); ++i) {
        for (Index j = i + 1; j < V.rows(); ++j) {
            best = std::max(best, (V.row(i) - V.row(j)).squaredNorm());
        }
    }
    return std::sqrt(best);
}

TriMesh mesh_scale(const TriMesh& mesh, double s)
{
    if (!(s > 0.0)) throw ValidationError("scale factor must be positive");
    return TriMesh(mesh.vertices() * s, mesh.faces());
}

std::vector<Index> boundary_vertices(const TriMesh& mesh)
{
    std::map<std::pair<int, int>, int> edge_faces;
    const auto& F = mesh.faces();
    for (Index f = 0; f < F.rows(); ++f) {
        for (int c = 0; c < 3; ++c) {
            int a = F(f, c);
            int b = F(f, (c + 1) % 3);
            if (a > b) std::swap(a, b);
            ++edge_faces[{a, b}];
        }
    }
    std::vector<bool> flag(mesh.num_vertices(), false);
    for (const auto& [edge, count] : edge_faces) {
        if (count == 1) flag[edge.first] = flag[edge.second] = true;
    }
    std::vector<Index> out;
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        if (flag[v]) out.push_back(v);
    }
    return out;
}

std::vector<Index> vertex_components(const TriMesh& mesh, Index* count)
{
    const Index n = mesh.num_vertices();
    std::vector<Index> parent(n);
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    const auto& F = mesh.faces();
    for (Index f = 0; f < F.rows(); ++f) {
        const Index a = find(F(f, 0));
        parent[find(F(f, 1))] = a;
        parent[find(F(f, 2))] = a;
    }
    std::vector<Index> label(n, -1);
    std::vector<Index> root_label(n, -1);
    Index next = 0;
    for (Index v = 0; v < n; ++v) {
        const Index r = find(v);
        if (root_label[r] < 0) root_label[r] = next++;
        label[v] = root_label[r];
    }
    if (count) *count = next;
    return label;
}

} // namespace rgd
