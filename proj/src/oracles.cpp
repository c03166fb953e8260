#include <rgd/error.hpp>
#include <rgd/oracles.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace rgd {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double x)
{
    double w = std::fmod(x, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w;
}

double ring_exact(double x, double alpha, RingKind kind)
{
    if (alpha == 0.0) {
        const double t = wrap_angle(x);
        return std::min(t, 2.0 * kPi - t);
    }
    return kind == RingKind::dirichlet ? circle_dirichlet_exact(x, alpha) : circle_hessian_exact(x, alpha);
}

} // namespace

double circle_dirichlet_exact(double x, double alpha)
{
    if (!(alpha > 0.0)) throw ValidationError("circle oracle needs alpha > 0");
    const double a = std::min(alpha, kPi);
    const double L = std::max(kPi - a, 0.0);
    const double t = wrap_angle(x);
    if (t <= L) return t;
    if (t >= 2.0 * kPi - L) return 2.0 * kPi - t;
    return kPi - 0.5 * a - (t - kPi) * (t - kPi) / (2.0 * a);
}

double circle_hessian_exact(double x, double alpha)
{
    if (!(alpha > 0.0)) throw ValidationError("Hessian oracle needs alpha > 0");
    const double c = std::cbrt(3.0 * alpha);
    if (c >= kPi) throw ValidationError("Hessian oracle needs cbrt(3 alpha) < pi");
    const double t = wrap_angle(x);
    if (t <= kPi - c) return t;
    if (t >= kPi + c) return 2.0 * kPi - t;
    const double d = t - kPi;
    const double d2 = d * d;
    return d2 * d2 / (24.0 * alpha) - c * c * d2 / (4.0 * alpha) + kPi - c + 5.0 * std::pow(c, 4) / (24.0 * alpha);
}

double disk_exact(double r, double alpha, double R)
{
    if (!(alpha > 0.0) || !(2.0 * alpha < R)) {
        throw ValidationError("disk oracle needs 0 < 2 alpha < R");
    }
    if (r < 0.0 || r > R) throw ValidationError("disk oracle radius outside [0, R]");
    if (r <= 2.0 * alpha) return -r * r / (4.0 * alpha) + R - alpha;
    return R - r;
}

double circle_metric_check(double alpha, int N)
{
    if (N < 3) throw ValidationError("circle metric check needs N >= 3");
    std::vector<double> table(N);
    for (int k = 0; k < N; ++k) table[k] = circle_dirichlet_exact(2.0 * kPi * k / N, alpha);
    auto d = [&](int i, int j) { return table[((i - j) % N + N) % N]; };
    double worst = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < N; ++x) {
        for (int y = 0; y < N; ++y) {
            const double dxy = d(x, y);
            for (int z = 0; z < N; ++z) worst = std::max(worst, dxy - d(x, z) - d(z, y));
        }
    }
    return worst;
}

Ring1D make_ring(int samples)
{
    if (samples < 3) throw ValidationError("ring needs at least 3 samples");
    Ring1D ring;
    ring.samples = samples;
    ring.spacing = 2.0 * kPi / samples;
    const double h = ring.spacing;
    const Index n = samples;

    std::vector<Eigen::Triplet<double>> g;
    std::vector<Eigen::Triplet<double>> l;
    for (Index e = 0; e < n; ++e) {
        const Index next = (e + 1) % n;
        g.emplace_back(e, e, -1.0 / h);
        g.emplace_back(e, next, 1.0 / h);
        l.emplace_back(e, e, 1.0 / h);
        l.emplace_back(next, next, 1.0 / h);
        l.emplace_back(e, next, -1.0 / h);
        l.emplace_back(next, e, -1.0 / h);
    }
    DiffOps& ops = ring.ops;
    ops.grad_dim = 1;
    ops.grad.resize(n, n);
    ops.grad.setFromTriplets(g.begin(), g.end());
    ops.laplacian.resize(n, n);
    ops.laplacian.setFromTriplets(l.begin(), l.end());
    ops.face_areas = Eigen::VectorXd::Constant(n, h);
    ops.vertex_areas = Eigen::VectorXd::Constant(n, h);
    ops.div = SparseMatrix(ops.grad.transpose()) * ops.face_areas.asDiagonal();
    ops.total_area = 2.0 * kPi;
    return ring;
}

SparseMatrix Ring1D::bilaplacian_excluding(Index source) const
{
    const Index n = samples;
    Eigen::VectorXd keep = Eigen::VectorXd::Constant(n, 1.0 / spacing);
    keep(source) = 0.0;
    SparseMatrix W = SparseMatrix(ops.laplacian.transpose()) * keep.asDiagonal() * ops.laplacian;
    W.prune(0.0);
    return W;
}

double Ring1D::position(Index i, Index source) const
{
    return wrap_angle(static_cast<double>(i - source) * spacing);
}

AdmmSettings ring_oracle_settings()
{
    return tight_settings();
}

DistanceField solve_ring_1d(int samples, double alpha, RingKind kind, Index source, const AdmmSettings& base)
{
    if (samples < 16) throw ValidationError("ring solver needs N >= 16");
    if (source < 0 || source >= samples) throw ValidationError("ring source out of range");
    const Ring1D ring = make_ring(samples);
    RegularizerMatrix W = kind == RingKind::dirichlet
        ? dirichlet_matrix(ring.ops)
        : RegularizerMatrix{ring.bilaplacian_excluding(source), RegularizerKind::bilaplacian, kHessianExponent};

    AdmmSettings settings = base;
    settings.alpha_hat = alpha;
    settings.alpha_mode = AlphaMode::raw;
    const Index sources[] = {source};
    return solve_fixed_source(ring.ops, W, sources, settings);
}

double ring_max_error(const Ring1D& ring, const Eigen::VectorXd& u, double alpha, RingKind kind, Index source)
{
    double worst = 0.0;
    for (Index i = 0; i < ring.samples; ++i) {
        worst = std::max(worst, std::abs(u(i) - ring_exact(ring.position(i, source), alpha, kind)));
    }
    return worst;
}

double ring_sup_error(
    const Ring1D& ring,
    const Eigen::VectorXd& u,
    double alpha,
    RingKind kind,
    Index source,
    int samples_per_edge)
{
    if (samples_per_edge < 1) throw ValidationError("samples_per_edge must be >= 1");
    double worst = 0.0;
    for (Index i = 0; i < ring.samples; ++i) {
        const Index next = (i + 1) % ring.samples;
        const double x0 = static_cast<double>(i - source) * ring.spacing;
        for (int k = 0; k < samples_per_edge; ++k) {
            const double t = static_cast<double>(k) / samples_per_edge;
            const double interp = (1.0 - t) * u(i) + t * u(next);
            worst = std::max(worst, std::abs(interp - ring_exact(x0 + t * ring.spacing, alpha, kind)));
        }
    }
    return worst;
}

} // namespace rgd
