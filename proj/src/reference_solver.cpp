#include <rgd/error.hpp>
#include <rgd/reference_solver.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgd {

namespace {

Eigen::VectorXd abs_row_sums(const SparseMatrix& A)
{
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(A.rows());
    for (Index col = 0; col < A.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(A, col); it; ++it) sums(it.row()) += std::abs(it.value());
    }
    return sums;
}

} // namespace

ReferenceResult reference_solve(
    const DiffOps& ops,
    const SparseMatrix& W,
    std::span<const Index> sources,
    double alpha,
    const ReferenceSettings& settings)
{
    const Index n = ops.num_vertices();
    const Index m = ops.num_faces();
    const int dim = ops.grad_dim;
    if (n > settings.max_vertices) {
        throw ValidationError("reference solver is limited to " + std::to_string(settings.max_vertices) + " vertices");
    }
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
    if (!(settings.tol > 0.0)) throw ValidationError("tol must be > 0");
    if (sources.empty()) throw ValidationError("source set is empty");
    if (alpha > 0.0 && (W.rows() != n || W.cols() != n)) throw ValidationError("W does not match the mesh");

    std::vector<bool> clamped(n, false);
    for (Index s : sources) {
        if (s < 0 || s >= n) throw ValidationError("source index out of range");
        clamped[s] = true;
    }

    const SparseMatrix& K = ops.grad;
    const SparseMatrix Kt = K.transpose();
    const Eigen::VectorXd col_abs = abs_row_sums(Kt);
    const Eigen::VectorXd row_abs = abs_row_sums(K);

    // T^-1 >= K^T S K + (alpha / 2) W holds by Gershgorin with these margins
    Eigen::VectorXd tau_inv = 1.05 * col_abs;
    if (alpha > 0.0) tau_inv += 0.6 * alpha * abs_row_sums(W);
    tau_inv = tau_inv.cwiseMax(1e-300);
    const Eigen::VectorXd tau = tau_inv.cwiseInverse();
    Eigen::VectorXd sigma(K.rows());
    for (Index f = 0; f < m; ++f) {
        const double s = 1.0 / std::max(row_abs.segment(f * dim, dim).maxCoeff(), 1e-300);
        sigma.segment(f * dim, dim).setConstant(s);
    }

    const double area = ops.total_area;
    const double max_av = ops.vertex_areas.maxCoeff();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(K.rows());
    Eigen::VectorXd grad_f(n);

    auto objective_gradient = [&](const Eigen::VectorXd& x) {
        grad_f = -ops.vertex_areas;
        if (alpha > 0.0) grad_f += alpha * (W * x);
    };

    ReferenceResult result;
    for (int iter = 1; iter <= settings.max_iter; ++iter) {
        objective_gradient(u);
        Eigen::VectorXd u_next = u - tau.cwiseProduct(grad_f + Kt * p);
        for (Index v = 0; v < n; ++v) {
            if (clamped[v]) u_next(v) = std::min(u_next(v), 0.0);
        }
        const Eigen::VectorXd extrapolated = 2.0 * u_next - u;
        p += sigma.cwiseProduct(K * extrapolated);
        // prox of the conjugate of the unit-ball indicator: shrink each face block
        for (Index f = 0; f < m; ++f) {
            auto block = p.segment(f * dim, dim);
            const double norm = block.norm();
            const double s = sigma(f * dim);
            block *= norm > s ? (1.0 - s / norm) : 0.0;
        }
        u.swap(u_next);

        if (iter % settings.check_interval != 0 && iter != settings.max_iter) continue;

        const Eigen::VectorXd gu = K * u;
        double infeasible = 0.0;
        double gap = 0.0;
        for (Index f = 0; f < m; ++f) {
            const auto g = gu.segment(f * dim, dim);
            const auto q = p.segment(f * dim, dim);
            infeasible = std::max(infeasible, g.norm() - 1.0);
            gap += q.norm() - q.dot(g);
        }
        objective_gradient(u);
        const Eigen::VectorXd force = grad_f + Kt * p;
        double stationary = 0.0;
        for (Index v = 0; v < n; ++v) {
            // natural residual of the clamp on E, plain force elsewhere
            const double r = clamped[v] ? std::abs(u(v) - std::min(u(v) - tau(v) * force(v), 0.0)) * tau_inv(v)
                                        : std::abs(force(v));
            stationary = std::max(stationary, r);
        }
        result.iterations = iter;
        result.infeasibility = std::max(infeasible, 0.0);
        result.complementarity = gap;
        result.stationarity = stationary / max_av;
        if (result.infeasibility <= settings.tol && result.stationarity <= settings.tol
            && std::abs(gap) <= settings.tol * area) {
            result.u = u;
            result.p = p;
            return result;
        }
    }
    throw std::runtime_error(
        "reference solver did not reach tol " + std::to_string(settings.tol) + " in "
        + std::to_string(settings.max_iter) + " iterations (stationarity "
        + std::to_string(result.stationarity) + ", infeasibility " + std::to_string(result.infeasibility)
        + ", gap " + std::to_string(result.complementarity) + ")");
}

} // namespace rgd
