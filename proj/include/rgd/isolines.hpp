#pragma once

#include <rgd/mesh.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace rgd {

struct Polyline
{
    int level_index = 0;
    double level = 0.0;
    std::vector<Eigen::Vector3d> points;
    /// Closed loops do not repeat their first point.
    bool closed = false;
};

struct IsolineSet
{
    std::vector<double> levels;
    std::vector<Polyline> polylines;
    /// Non-empty when nothing could be extracted (e.g. constant input).
    std::string warning;
};

/// Level sets of the piecewise-linear function u at k levels evenly spaced
/// strictly inside (min u, max u): min + (max - min) * j / (k + 1), j = 1..k.
/// Segments are chained across shared edges into polylines.
IsolineSet extract_isolines(const TriMesh& mesh, const Eigen::VectorXd& u, int k);

/// Isolines at explicit levels.
IsolineSet extract_isolines_at(const TriMesh& mesh, const Eigen::VectorXd& u, const std::vector<double>& levels);

/// Orthographic SVG plot that drops coordinate `drop_axis` (0, 1 or 2).
void export_svg(const IsolineSet& isolines, const std::filesystem::path& path, int drop_axis = 2);
std::string svg_document(const IsolineSet& isolines, int drop_axis = 2);

} // namespace rgd
