#include <rgd/allpairs.hpp>
#include <rgd/error.hpp>
#include <rgd/parallel.hpp>

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rgd {

namespace {

using Solver = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

// Per-column squared norms, summed in column order after the parallel loop.
struct ColumnSums
{
    Eigen::VectorXd primal, grad, aux, dual_step, dual;

    explicit ColumnSums(Index n)
        : primal(Eigen::VectorXd::Zero(n))
        , grad(Eigen::VectorXd::Zero(n))
        , aux(Eigen::VectorXd::Zero(n))
        , dual_step(Eigen::VectorXd::Zero(n))
        , dual(Eigen::VectorXd::Zero(n))
    {}
};

struct GradientBlock
{
    Eigen::MatrixXd U; // X or R
    Eigen::MatrixXd Z;
    Eigen::MatrixXd Y;
    Eigen::MatrixXd mu;
};

// rho_eff is the area-scaled penalty rho2 / sqrt(A)
void consensus_into(
    Eigen::MatrixXd& D,
    const Eigen::MatrixXd& X,
    const Eigen::MatrixXd& R,
    const Eigen::MatrixXd& mu,
    const Eigen::MatrixXd& nu,
    double rho_eff)
{
    const Index n = X.rows();
    D.resize(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double v = (mu(i, j) + nu(j, i)) / (2.0 * rho_eff) + (X(i, j) + R(j, i)) / 2.0;
            D(i, j) = std::max(v, 0.0);
        }
    }
    D.diagonal().setZero();
}

double ratio(double residual, double tolerance)
{
    return residual / std::max(tolerance, std::numeric_limits<double>::min());
}

} // namespace

void AllPairsSettings::validate() const
{
    if (!(alpha_hat >= 0.0)) throw ValidationError("alpha_hat must be >= 0");
    if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw ValidationError("penalties must be > 0");
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) throw ValidationError("tolerances must be > 0");
    if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
    if (!(over_relaxation >= 1.0 && over_relaxation <= 1.8)) {
        throw ValidationError("over_relaxation must lie in [1, 1.8]");
    }
    if (cap < 1) throw ValidationError("cap must be >= 1");
    if (mirror_check_interval < 1) throw ValidationError("mirror_check_interval must be >= 1");
}

Eigen::MatrixXd consensus_update(
    const Eigen::MatrixXd& X,
    const Eigen::MatrixXd& R,
    const Eigen::MatrixXd& mu,
    const Eigen::MatrixXd& nu,
    double rho2,
    double area)
{
    const Index n = X.rows();
    if (X.cols() != n || R.rows() != n || R.cols() != n || mu.rows() != n || mu.cols() != n || nu.rows() != n
        || nu.cols() != n) {
        throw ValidationError("consensus_update needs square matrices of equal size");
    }
    Eigen::MatrixXd D(n, n);
    consensus_into(D, X, R, mu, nu, rho2 / std::sqrt(area));
    return D;
}

DistanceMatrix solve_all_pairs(const DiffOps& ops, const AllPairsSettings& settings)
{
    settings.validate();
    const Index n = ops.num_vertices();
    if (n > settings.cap) {
        throw ValidationError(
            "all-pairs needs dense n x n state; n = " + std::to_string(n) + " exceeds the cap of "
            + std::to_string(settings.cap));
    }
    if ((ops.vertex_areas.array() <= 0.0).any()) {
        throw ValidationError("all-pairs needs positive vertex areas (isolated vertex?)");
    }

    const double area = ops.total_area;
    const double sqrt_area = std::sqrt(area);
    const double alpha = settings.alpha_mode == AlphaMode::raw
        ? settings.alpha_hat
        : scale_alpha(settings.alpha_hat, area, kFirstOrderExponent);
    const double rho1 = settings.rho1 * sqrt_area;
    const double rho2 = settings.rho2 / sqrt_area;
    const double eta = settings.over_relaxation;
    const int dim = ops.grad_dim;
    const Index k = ops.grad.rows();
    const Eigen::VectorXd& av = ops.vertex_areas;
    const Eigen::VectorXd sqrt_mass_f = ops.face_mass_diagonal().cwiseSqrt();

    DistanceMatrix result;
    result.alpha = alpha;

    SparseMatrix system = (alpha + rho1) * ops.laplacian;
    system += SparseMatrix((rho2 * av).asDiagonal());
    Solver solver(system);
    if (solver.info() != Eigen::Success) throw FactorizationError("all-pairs system is not positive definite");
    result.factorizations = 1;

    const Eigen::VectorXd half_av = 0.5 * av;
    GradientBlock cols{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(k, n), Eigen::MatrixXd::Zero(k, n),
                       Eigen::MatrixXd::Zero(n, n)};
    GradientBlock rows = cols;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd D_prev = D;
    Eigen::MatrixXd best_D = D;
    double best_score = std::numeric_limits<double>::infinity();

    // Columns are split into fixed contiguous chunks, one per worker, each with
    // persistent scratch space. Sparse products and triangular solves act
    // column by column, so the chunking does not change any value.
    struct Workspace
    {
        Index first = 0, width = 0;
        Eigen::MatrixXd rhs, gx, z, z_prev, tmp_k, tmp_n;
    };
    const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    std::vector<Workspace> work(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        work[c].first = static_cast<Index>(n * c / chunks);
        work[c].width = static_cast<Index>(n * (c + 1) / chunks) - work[c].first;
        work[c].rhs.resize(n, work[c].width);
        work[c].tmp_n.resize(n, work[c].width);
        work[c].gx.resize(k, work[c].width);
        work[c].z.resize(k, work[c].width);
        work[c].z_prev.resize(k, work[c].width);
        work[c].tmp_k.resize(k, work[c].width);
    }

    auto gradient_pass = [&](GradientBlock& b, bool transpose_target, ColumnSums& sums) {
        parallel_for(chunks, [&](std::size_t cbegin, std::size_t cend) {
            for (std::size_t c = cbegin; c < cend; ++c) {
                Workspace& ws = work[c];
                const Index j0 = ws.first;
                const Index w = ws.width;
                auto U = b.U.middleCols(j0, w);
                auto Z = b.Z.middleCols(j0, w);
                auto Y = b.Y.middleCols(j0, w);

                ws.tmp_k.noalias() = rho1 * Z - Y;
                ws.rhs.noalias() = ops.div * ws.tmp_k;
                if (transpose_target) {
                    ws.tmp_n = D.middleRows(j0, w).transpose();
                } else {
                    ws.tmp_n = D.middleCols(j0, w);
                }
                ws.tmp_n = rho2 * ws.tmp_n - b.mu.middleCols(j0, w);
                ws.rhs += av.asDiagonal() * ws.tmp_n;
                ws.rhs.colwise() += half_av;
                U = solver.solve(ws.rhs);

                ws.gx.noalias() = ops.grad * U;
                ws.z_prev = Z;
                if (eta != 1.0) ws.gx = eta * ws.gx + (1.0 - eta) * ws.z_prev;
                ws.z = ws.gx + Y / rho1;
                for (Index col = 0; col < w; ++col) project_blocks_unit_ball(ws.z.col(col), dim);
                Y += rho1 * (ws.gx - ws.z);
                Z = ws.z;
                if (eta != 1.0) ws.gx.noalias() = ops.grad * U;

                for (Index col = 0; col < w; ++col) {
                    sums.primal(j0 + col) = sqrt_mass_f.cwiseProduct(ws.gx.col(col) - ws.z.col(col)).squaredNorm();
                    sums.grad(j0 + col) = sqrt_mass_f.cwiseProduct(ws.gx.col(col)).squaredNorm();
                    sums.aux(j0 + col) = sqrt_mass_f.cwiseProduct(ws.z.col(col)).squaredNorm();
                }
                ws.tmp_k = ws.z - ws.z_prev;
                ws.tmp_n.noalias() = ops.div * ws.tmp_k;
                for (Index col = 0; col < w; ++col) sums.dual_step(j0 + col) = ws.tmp_n.col(col).squaredNorm();
                ws.tmp_n.noalias() = ops.div * Y;
                for (Index col = 0; col < w; ++col) sums.dual(j0 + col) = ws.tmp_n.col(col).squaredNorm();
            }
        });
    };

    const double sn = std::sqrt(static_cast<double>(n));
    const double eps_pri_abs = std::sqrt(static_cast<double>(k)) * settings.eps_abs * area;
    const double eps_dual_abs = sn * settings.eps_abs * area * area;

    auto gradient_score = [&](const ColumnSums& s) {
        const double r = std::sqrt(s.primal.sum());
        const double dual = settings.rho1 * std::sqrt(s.dual_step.sum());
        const double eps_pri = eps_pri_abs + settings.eps_rel * std::sqrt(std::max(s.grad.sum(), s.aux.sum()));
        const double eps_dual = eps_dual_abs + settings.eps_rel * std::sqrt(s.dual.sum());
        return std::max(ratio(r, eps_pri), ratio(dual, eps_dual));
    };

    ColumnSums sums_x(n), sums_r(n);
    for (int iter = 1; iter <= settings.max_iter; ++iter) {
        gradient_pass(cols, false, sums_x);
        gradient_pass(rows, true, sums_r);

        D_prev.swap(D);
        consensus_into(D, cols.U, rows.U, cols.mu, rows.mu, rho2);
        cols.mu += rho2 * (cols.U - D);
        rows.mu += rho2 * (rows.U - D.transpose());

        // consensus residuals, weighted by M_V on both sides
        Eigen::VectorXd r1(n), r2(n), step(n), x_norm(n), r_norm(n), d_norm(n), mu_norm(n), nu_norm(n);
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
            for (std::size_t cs = begin; cs < end; ++cs) {
                const Index j = static_cast<Index>(cs);
                const Eigen::VectorXd w = av * av(j);
                const Eigen::VectorXd dt = D.row(j).transpose();
                r1(j) = w.cwiseProduct(cols.U.col(j) - D.col(j)).squaredNorm();
                r2(j) = w.cwiseProduct(rows.U.col(j) - dt).squaredNorm();
                step(j) = w.cwiseProduct(D.col(j) - D_prev.col(j)).squaredNorm();
                x_norm(j) = w.cwiseProduct(cols.U.col(j)).squaredNorm();
                r_norm(j) = w.cwiseProduct(rows.U.col(j)).squaredNorm();
                d_norm(j) = w.cwiseProduct(D.col(j)).squaredNorm();
                mu_norm(j) = w.cwiseSqrt().cwiseProduct(cols.mu.col(j)).squaredNorm();
                nu_norm(j) = w.cwiseSqrt().cwiseProduct(rows.mu.col(j)).squaredNorm();
            }
        });
        const double eps1 = sn * settings.eps_abs + settings.eps_rel * std::sqrt(std::max(x_norm.sum(), d_norm.sum()));
        const double eps2 = sn * settings.eps_abs * std::sqrt(area * area * area)
            + settings.eps_rel * std::sqrt(std::max(r_norm.sum(), d_norm.sum()));
        const double eps_dual_c = sn * settings.eps_abs * area
            + 0.5 * settings.eps_rel * (std::sqrt(mu_norm.sum()) + std::sqrt(nu_norm.sum()));

        const double score = std::max({gradient_score(sums_x), gradient_score(sums_r),
                                       ratio(std::sqrt(r1.sum()), eps1), ratio(std::sqrt(r2.sum()), eps2),
                                       ratio(settings.rho2 * std::sqrt(step.sum()), eps_dual_c)});
        result.residual_ratio.push_back(score);
        result.iterations = iter;

        if (iter % settings.mirror_check_interval == 0) {
            const double scale = std::max(1.0, cols.U.cwiseAbs().maxCoeff());
            const double gap = (rows.U - cols.U).cwiseAbs().maxCoeff() / scale;
            result.max_mirror_gap = std::max(result.max_mirror_gap, gap);
            ++result.mirror_checks;
        }

        if (score < best_score) {
            best_score = score;
            best_D = D;
        }
        if (score <= 1.0) {
            result.converged = true;
            break;
        }
    }

    result.D = result.converged ? D : best_D;
    return result;
}

} // namespace rgd
