#include <rgd/error.hpp>
#include <rgd/metrics.hpp>
#include <rgd/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace rgd {

namespace {

constexpr double kTriangleSlack = 1e-9;
constexpr std::uint64_t kAuditChunk = 8192;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& D)
{
    if (D.rows() != D.cols()) throw ValidationError("distance matrix must be square");
    return 0.5 * (D + D.transpose());
}

struct ChunkTally
{
    std::uint64_t tested = 0;
    std::uint64_t violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
};

} // namespace

Eigen::VectorXd gradient_norm_field(const DiffOps& ops, const Eigen::VectorXd& u)
{
    if (u.size() != ops.num_vertices()) throw ValidationError("u has the wrong length");
    return face_gradients(ops, u).rowwise().norm();
}

SymmetryStats symmetry_error(const Eigen::MatrixXd& D, double area)
{
    if (D.rows() != D.cols()) throw ValidationError("distance matrix must be square");
    if (!(area > 0.0)) throw ValidationError("area must be positive");
    const double scale = 1.0 / std::sqrt(area);
    SymmetryStats stats;
    double sum = 0.0;
    std::uint64_t pairs = 0;
    for (Index j = 0; j < D.cols(); ++j) {
        for (Index i = 0; i < j; ++i) {
            const double e = scale * std::abs(D(i, j) - D(j, i));
            stats.max = std::max(stats.max, e);
            sum += e;
            ++pairs;
        }
    }
    stats.mean = pairs ? sum / static_cast<double>(pairs) : 0.0;
    return stats;
}

TriangleAudit triangle_audit(const Eigen::MatrixXd& D_in, std::uint64_t sample_size, std::uint64_t seed, AuditMode mode)
{
    const Eigen::MatrixXd D = symmetrized(D_in);
    const Index n = D.rows();
    TriangleAudit report;
    if (n < 3) return report;
    report.slack = kTriangleSlack * D.maxCoeff();
    const double slack = report.slack;

    std::vector<ChunkTally> tallies;
    if (mode == AuditMode::automatic && n <= kExhaustiveAuditLimit) {
        report.exhaustive = true;
        tallies.resize(static_cast<std::size_t>(n));
        parallel_for(tallies.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t xs = begin; xs < end; ++xs) {
                const Index x = static_cast<Index>(xs);
                ChunkTally& t = tallies[xs];
                for (Index y = x + 1; y < n; ++y) {
                    for (Index z = 0; z < n; ++z) {
                        if (z == x || z == y) continue;
                        const double excess = D(x, y) - D(x, z) - D(z, y);
                        ++t.tested;
                        if (excess > slack) ++t.violations;
                        t.worst = std::max(t.worst, excess);
                    }
                }
            }
        });
    } else {
        const std::uint64_t chunks = (sample_size + kAuditChunk - 1) / kAuditChunk;
        tallies.resize(chunks);
        parallel_for(chunks, [&](std::size_t begin, std::size_t end) {
            for (std::size_t c = begin; c < end; ++c) {
                std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                                  static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
                std::mt19937_64 rng(seq);
                std::uniform_int_distribution<Index> pick(0, n - 1);
                const std::uint64_t count = std::min(kAuditChunk, sample_size - c * kAuditChunk);
                ChunkTally& t = tallies[c];
                for (std::uint64_t s = 0; s < count; ++s) {
                    Index x, y, z;
                    do {
                        x = pick(rng);
                        y = pick(rng);
                        z = pick(rng);
                    } while (x == y || y == z || x == z);
                    const double excess = D(x, y) - D(x, z) - D(z, y);
                    ++t.tested;
                    if (excess > slack) ++t.violations;
                    t.worst = std::max(t.worst, excess);
                }
            }
        });
    }

    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& t : tallies) {
        report.triplets += t.tested;
        report.violations += t.violations;
        worst = std::max(worst, t.worst);
    }
    report.max_violation = report.triplets ? worst : 0.0;
    report.violation_pct = report.triplets
        ? 100.0 * static_cast<double>(report.violations) / static_cast<double>(report.triplets)
        : 0.0;
    return report;
}

Eigen::VectorXd pair_violation(const Eigen::MatrixXd& D_in, Index i, Index j)
{
    const Eigen::MatrixXd D = symmetrized(D_in);
    const Index n = D.rows();
    if (i < 0 || j < 0 || i >= n || j >= n) throw ValidationError("pair index out of range");
    Eigen::VectorXd out(n);
    for (Index k = 0; k < n; ++k) out(k) = std::max(D(i, j) - D(i, k) - D(k, j), 0.0);
    return out;
}

double max_error_vs(const Eigen::VectorXd& u, const Eigen::VectorXd& ref)
{
    if (u.size() != ref.size()) throw ValidationError("max_error_vs needs equal lengths");
    if (ref.size() == 0) throw ValidationError("max_error_vs needs non-empty input");
    const double peak = ref.maxCoeff();
    if (!(peak > 0.0)) throw ValidationError("reference has no positive entry");
    return 100.0 * (u - ref).cwiseAbs().maxCoeff() / peak;
}

} // namespace rgd
