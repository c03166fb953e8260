#include <rgd/error.hpp>
#include <rgd/isolines.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace rgd {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b)
{
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

struct Segment
{
    EdgeKey ends[2];
    Eigen::Vector3d points[2];
};

std::vector<Polyline> chain_segments(const std::vector<Segment>& segments, int level_index, double level)
{
    std::map<EdgeKey, std::vector<std::size_t>> incident;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        for (const auto& e : segments[s].ends) incident[e].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);

    auto walk = [&](std::size_t start, int start_end) {
        Polyline line;
        line.level_index = level_index;
        line.level = level;
        std::size_t current = start;
        int exit_end = 1 - start_end;
        line.points.push_back(segments[current].points[start_end]);
        used[current] = true;
        while (true) {
            line.points.push_back(segments[current].points[exit_end]);
            const EdgeKey key = segments[current].ends[exit_end];
            std::size_t next = segments.size();
            for (std::size_t cand : incident[key]) {
                if (!used[cand]) {
                    next = cand;
                    break;
                }
            }
            if (next == segments.size()) {
                if (key == segments[start].ends[start_end] && line.points.size() > 2) {
                    line.points.pop_back();
                    line.closed = true;
                }
                break;
            }
            used[next] = true;
            exit_end = segments[next].ends[0] == key ? 1 : 0;
            current = next;
        }
        return line;
    };

    std::vector<Polyline> lines;
    // open chains start at an edge touched by a single segment
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        for (int end = 0; end < 2; ++end) {
            if (!used[s] && incident[segments[s].ends[end]].size() == 1) lines.push_back(walk(s, end));
        }
    }
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (!used[s]) lines.push_back(walk(s, 0));
    }
    return lines;
}

} // namespace

IsolineSet extract_isolines(const TriMesh& mesh, const Eigen::VectorXd& u, int k)
{
    if (k < 1) throw ValidationError("isoline count must be >= 1");
    if (u.size() != mesh.num_vertices()) throw ValidationError("u has the wrong length");
    const double lo = u.minCoeff();
    const double hi = u.maxCoeff();
    if (!(hi > lo)) {
        IsolineSet empty;
        empty.warning = "function is constant; no isolines";
        return empty;
    }
    std::vector<double> levels;
    for (int j = 1; j <= k; ++j) levels.push_back(lo + (hi - lo) * j / (k + 1));
    return extract_isolines_at(mesh, u, levels);
}

IsolineSet extract_isolines_at(const TriMesh& mesh, const Eigen::VectorXd& u, const std::vector<double>& levels)
{
    if (u.size() != mesh.num_vertices()) throw ValidationError("u has the wrong length");
    IsolineSet set;
    set.levels = levels;
    const auto& F = mesh.faces();
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const double c = levels[li];
        std::vector<Segment> segments;
        for (Index f = 0; f < F.rows(); ++f) {
            Segment seg;
            int found = 0;
            for (int e = 0; e < 3; ++e) {
                const int a = F(f, e);
                const int b = F(f, (e + 1) % 3);
                const bool above_a = u(a) > c;
                const bool above_b = u(b) > c;
                if (above_a == above_b) continue;
                const double t = (c - u(a)) / (u(b) - u(a));
                if (found < 2) {
                    seg.ends[found] = edge_key(a, b);
                    seg.points[found] = (1.0 - t) * mesh.position(a) + t * mesh.position(b);
                }
                ++found;
            }
            if (found == 2) segments.push_back(seg);
        }
        auto lines = chain_segments(segments, static_cast<int>(li), c);
        set.polylines.insert(set.polylines.end(), lines.begin(), lines.end());
    }
    if (set.polylines.empty()) set.warning = "no level crosses the mesh";
    return set;
}

std::string svg_document(const IsolineSet& isolines, int drop_axis)
{
    if (drop_axis < 0 || drop_axis > 2) throw ValidationError("projection axis must be 0, 1 or 2");
    const int ax = drop_axis == 0 ? 1 : 0;
    const int ay = drop_axis == 2 ? 1 : 2;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& line : isolines.polylines) {
        for (const auto& p : line.points) {
            xmin = std::min(xmin, p(ax));
            xmax = std::max(xmax, p(ax));
            ymin = std::min(ymin, p(ay));
            ymax = std::max(ymax, p(ay));
        }
    }
    constexpr double size = 800.0;
    constexpr double margin = 20.0;
    const double extent = std::max({xmax - xmin, ymax - ymin, 1e-300});
    const double scale = std::isfinite(xmin) ? (size - 2 * margin) / extent : 1.0;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const double levels = std::max<double>(1.0, static_cast<double>(isolines.levels.size()));
    char buf[64];
    for (const auto& line : isolines.polylines) {
        // blue (low) to red (high)
        const double hue = 240.0 * (1.0 - line.level_index / std::max(1.0, levels - 1.0));
        svg << (line.closed ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"hsl(" << static_cast<int>(hue)
            << ",80%,45%)\" stroke-width=\"1.5\" data-level=\"" << line.level << "\" points=\"";
        for (std::size_t i = 0; i < line.points.size(); ++i) {
            const double x = margin + (line.points[i](ax) - xmin) * scale;
            const double y = size - margin - (line.points[i](ay) - ymin) * scale;
            std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", x, y);
            svg << buf;
        }
        svg << "\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void export_svg(const IsolineSet& isolines, const std::filesystem::path& path, int drop_axis)
{
    const std::string doc = svg_document(isolines, drop_axis);
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    out << doc;
}

} // namespace rgd
