#pragma once

#include <rgd/mesh.hpp>

#include <cstdint>

namespace rgd {

/// Flat disk of the given radius in the z = 0 plane, triangulated in
/// concentric rings: ring k (1..rings) has 6k vertices, 6 * rings^2 faces
/// total, near-uniform edge length radius / rings. Vertex 0 is the center.
TriMesh make_disk(double radius, int rings);

/// Flat rectangle [0, width] x [0, height] split into nx by ny cells with
/// alternating diagonals.
TriMesh make_grid(double width, double height, int nx, int ny);

/// Jittered grid over [0,1]^2 lifted to a smooth random height field.
/// Deterministic for a given seed.
TriMesh make_random_surface(std::uint64_t seed, int nx, int ny, double jitter, double amplitude);

} // namespace rgd
