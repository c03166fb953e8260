#include <rgd/admm.hpp>
#include <rgd/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace rgd {

void AdmmSettings::validate() const
{
    if (!(alpha_hat >= 0.0)) throw ValidationError("alpha_hat must be >= 0");
    if (!(rho > 0.0)) throw ValidationError("rho must be > 0");
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) throw ValidationError("tolerances must be > 0");
    if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
    if (!(over_relaxation >= 1.0 && over_relaxation <= 1.8)) {
        throw ValidationError("over_relaxation must lie in [1, 1.8]");
    }
    if (penalty_adapt && (!(penalty_mu > 1.0) || !(penalty_tau > 1.0) || penalty_interval < 1)) {
        throw ValidationError("penalty adaptation needs mu > 1, tau > 1, interval >= 1");
    }
}

AdmmSettings strict_settings()
{
    AdmmSettings s;
    s.eps_abs = 1e-8;
    s.eps_rel = 1e-5;
    return s;
}

AdmmSettings tight_settings()
{
    AdmmSettings s;
    s.eps_abs = 1e-10;
    s.eps_rel = 1e-8;
    s.max_iter = 50000;
    return s;
}

double scale_alpha(double alpha_hat, double area, double exponent)
{
    return alpha_hat * std::pow(area, exponent);
}

double scale_alpha(double alpha_hat, double area, RegularizerKind kind)
{
    const bool hessian = kind == RegularizerKind::bilaplacian || kind == RegularizerKind::external;
    return scale_alpha(alpha_hat, area, hessian ? kHessianExponent : kFirstOrderExponent);
}

Eigen::Vector3d project_unit_ball(const Eigen::Vector3d& z)
{
    const double norm = z.norm();
    return norm > 1.0 ? Eigen::Vector3d(z / norm) : z;
}

void project_blocks_unit_ball(Eigen::Ref<Eigen::VectorXd> z, int dim)
{
    const Index blocks = z.size() / dim;
    for (Index b = 0; b < blocks; ++b) {
        auto block = z.segment(b * dim, dim);
        const double norm = block.norm();
        if (norm > 1.0) block /= norm;
    }
}

std::vector<Index> validate_sources(const DiffOps& ops, std::span<const Index> sources)
{
    const Index n = ops.num_vertices();
    if (sources.empty()) throw ValidationError("source set is empty");
    std::vector<Index> sorted(sources.begin(), sources.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= n) {
        throw ValidationError("source index outside [0, " + std::to_string(n) + ")");
    }

    // union-find over vertices sharing an element (grad row block)
    std::vector<Index> parent(n);
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<Index> element_vertex(ops.num_faces(), -1);
    for (Index v = 0; v < ops.grad.outerSize(); ++v) {
        for (SparseMatrix::InnerIterator it(ops.grad, v); it; ++it) {
            const Index f = it.row() / ops.grad_dim;
            if (element_vertex[f] < 0) {
                element_vertex[f] = v;
            } else {
                parent[find(v)] = find(element_vertex[f]);
            }
        }
    }
    std::vector<bool> covered(n, false);
    for (Index s : sorted) covered[find(s)] = true;
    for (Index v = 0; v < n; ++v) {
        if (!covered[find(v)]) {
            throw ValidationError(
                "source set misses the connected component containing vertex " + std::to_string(v));
        }
    }
    return sorted;
}

Factorization::Factorization(const SparseMatrix& system, std::span<const Index> eliminated)
    : m_full_size(system.rows())
{
    std::vector<Index> full_to_free(m_full_size, 0);
    for (Index e : eliminated) full_to_free[e] = -1;
    for (Index v = 0; v < m_full_size; ++v) {
        if (full_to_free[v] == 0) {
            full_to_free[v] = static_cast<Index>(m_free.size());
            m_free.push_back(v);
        }
    }

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(system.nonZeros());
    for (Index col = 0; col < system.outerSize(); ++col) {
        if (full_to_free[col] < 0) continue;
        for (SparseMatrix::InnerIterator it(system, col); it; ++it) {
            if (full_to_free[it.row()] < 0) continue;
            entries.emplace_back(full_to_free[it.row()], full_to_free[col], it.value());
        }
    }
    const Index k = static_cast<Index>(m_free.size());
    m_reduced.resize(k, k);
    m_reduced.setFromTriplets(entries.begin(), entries.end());

    auto solver = std::make_shared<Solver>();
    if (k > 0) {
        solver->compute(m_reduced);
        if (solver->info() != Eigen::Success) {
            throw FactorizationError(
                "u-step system is not positive definite (source set misses a component, or W is indefinite)");
        }
    }
    m_solver = std::move(solver);
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& rhs) const
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m_full_size);
    if (m_free.empty()) return out;
    Eigen::VectorXd reduced(static_cast<Index>(m_free.size()));
    for (std::size_t i = 0; i < m_free.size(); ++i) reduced(i) = rhs(m_free[i]);
    const Eigen::VectorXd x = m_solver->solve(reduced);
    for (std::size_t i = 0; i < m_free.size(); ++i) out(m_free[i]) = x(i);
    return out;
}

Factorization prefactor_system(
    const DiffOps& ops,
    const RegularizerMatrix& W,
    double alpha,
    double rho,
    std::span<const Index> sources)
{
    if (W.W.rows() != ops.num_vertices() || W.W.cols() != ops.num_vertices()) {
        throw ValidationError("regularizer dimension does not match the mesh");
    }
    SparseMatrix system = (rho * std::sqrt(ops.total_area)) * ops.laplacian;
    if (alpha > 0.0) system += alpha * W.W;
    return Factorization(system, sources);
}

double fixed_source_objective(const DiffOps& ops, const SparseMatrix& W, double alpha, const Eigen::VectorXd& u)
{
    double value = -ops.vertex_areas.dot(u);
    if (alpha > 0.0) value += 0.5 * alpha * u.dot(W * u);
    return value;
}

DistanceField solve_fixed_source(
    const DiffOps& ops,
    const RegularizerMatrix& W,
    std::span<const Index> sources,
    const AdmmSettings& settings)
{
    settings.validate();
    DistanceField result;
    result.sources = validate_sources(ops, sources);

    const Index n = ops.num_vertices();
    const int dim = ops.grad_dim;
    const double area = ops.total_area;
    const double sqrt_area = std::sqrt(area);
    const double alpha = settings.alpha_hat == 0.0 ? 0.0
        : settings.alpha_mode == AlphaMode::raw    ? settings.alpha_hat
                                                   : scale_alpha(settings.alpha_hat, area, W.scale_exponent);
    result.alpha = alpha;

    double rho = settings.rho;
    Factorization factor = prefactor_system(ops, W, alpha, rho, result.sources);
    result.factorizations = 1;

    const Eigen::VectorXd sqrt_mass_f = ops.face_mass_diagonal().cwiseSqrt();
    const Index k = ops.grad.rows();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd best_u = u;
    double best_score = std::numeric_limits<double>::infinity();

    const double eta = settings.over_relaxation;
    const double eps_pri_abs = std::sqrt(static_cast<double>(k)) * settings.eps_abs * area;
    const double eps_dual_abs = std::sqrt(static_cast<double>(n)) * settings.eps_abs * area;
    int last_penalty_change = 0;

    for (int iter = 1; iter <= settings.max_iter; ++iter) {
        const double rho_eff = rho * sqrt_area;
        const Eigen::VectorXd rhs = ops.vertex_areas - ops.div * y + rho_eff * (ops.div * z);
        u = factor.solve(rhs);

        const Eigen::VectorXd gu = ops.grad * u;
        const Eigen::VectorXd z_prev = z;
        const Eigen::VectorXd relaxed = eta == 1.0 ? gu : Eigen::VectorXd(eta * gu + (1.0 - eta) * z_prev);
        z = relaxed + y / rho_eff;
        project_blocks_unit_ball(z, dim);
        y += rho_eff * (relaxed - z);

        const double r_norm = sqrt_mass_f.cwiseProduct(gu - z).norm();
        const double s_norm = rho * (ops.div * (z - z_prev)).norm();
        const double eps_pri = eps_pri_abs
            + settings.eps_rel * sqrt_area
                * std::max(sqrt_mass_f.cwiseProduct(gu).norm(), sqrt_mass_f.cwiseProduct(z).norm());
        const double eps_dual = eps_dual_abs + settings.eps_rel * sqrt_area * (ops.div * y).norm();
        result.primal_residuals.push_back(r_norm);
        result.dual_residuals.push_back(s_norm);
        result.iterations = iter;

        const double score = std::max(r_norm / eps_pri, s_norm / eps_dual);
        if (score < best_score) {
            best_score = score;
            best_u = u;
        }
        if (r_norm <= eps_pri && s_norm <= eps_dual) {
            result.converged = true;
            break;
        }

        if (settings.penalty_adapt && iter - last_penalty_change >= settings.penalty_interval) {
            double next_rho = rho;
            if (r_norm > settings.penalty_mu * s_norm) {
                next_rho = rho * settings.penalty_tau;
            } else if (s_norm > settings.penalty_mu * r_norm) {
                next_rho = rho / settings.penalty_tau;
            }
            if (next_rho != rho) {
                rho = next_rho;
                factor = prefactor_system(ops, W, alpha, rho, result.sources);
                ++result.factorizations;
                last_penalty_change = iter;
            }
        }
    }

    result.u = result.converged ? u : best_u;
    result.final_rho = rho;
    return result;
}

} // namespace rgd
