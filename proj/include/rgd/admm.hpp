#pragma once

#include <rgd/diff_ops.hpp>
#include <rgd/regularizers.hpp>

#include <Eigen/SparseCholesky>

#include <memory>
#include <span>
#include <vector>

namespace rgd {

enum class AlphaMode {
    scale_invariant, ///< alpha = alpha_hat * A^e with e from the regularizer
    raw,             ///< alpha_hat is used as alpha directly
};

struct AdmmSettings
{
    double alpha_hat = 0.0;
    AlphaMode alpha_mode = AlphaMode::scale_invariant;
    double rho = 2.0;
    double eps_abs = 5e-6;
    double eps_rel = 1e-2;
    int max_iter = 10000;
    /// eta in [1, 1.8]; 1 disables over-relaxation.
    double over_relaxation = 1.5;
    /// Residual balancing (mu, tau); rho changes at most every `penalty_interval`
    /// iterations and each change refactors the system.
    bool penalty_adapt = false;
    double penalty_mu = 10.0;
    double penalty_tau = 2.0;
    int penalty_interval = 25;

    void validate() const;
};

/// Stopping thresholds well below the defaults (eps_abs 1e-8, eps_rel 1e-5).
/// The default thresholds scale with A and sqrt(A) in ways that loosen them on
/// large meshes; this profile keeps the solver error below the mesh error.
AdmmSettings strict_settings();

/// eps_abs 1e-10, eps_rel 1e-8, max_iter 50000: for comparisons against
/// another solver, where the solver error itself is what is measured.
AdmmSettings tight_settings();

struct DistanceField
{
    Eigen::VectorXd u;
    std::vector<Index> sources;
    int iterations = 0;
    bool converged = false;
    std::vector<double> primal_residuals;
    std::vector<double> dual_residuals;
    double alpha = 0.0;
    double final_rho = 0.0;
    int factorizations = 0;
};

double scale_alpha(double alpha_hat, double area, double exponent);
double scale_alpha(double alpha_hat, double area, RegularizerKind kind);

Eigen::Vector3d project_unit_ball(const Eigen::Vector3d& z);

/// Projects each consecutive `dim`-block of `z` onto the unit ball, in place.
void project_blocks_unit_ball(Eigen::Ref<Eigen::VectorXd> z, int dim);

/// Throws ValidationError unless `sources` is non-empty, in range, and touches
/// every connected component of the element-vertex incidence graph.
std::vector<Index> validate_sources(const DiffOps& ops, std::span<const Index> sources);

/// Direct factorization of (alpha W + rho sqrt(A) W_D) with the rows and
/// columns of the source set removed. Immutable; copies share the factor.
class Factorization
{
public:
    Factorization(const SparseMatrix& system, std::span<const Index> eliminated);

    /// Solves with a full-length right-hand side; eliminated entries of the
    /// result are 0 and the corresponding rhs entries are ignored.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    const SparseMatrix& reduced_matrix() const { return m_reduced; }
    const std::vector<Index>& free_indices() const { return m_free; }
    Index size() const { return m_full_size; }

private:
    using Solver = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
    std::shared_ptr<const Solver> m_solver;
    SparseMatrix m_reduced;
    std::vector<Index> m_free;
    Index m_full_size = 0;
};

/// Throws FactorizationError if the reduced system is not positive definite.
Factorization prefactor_system(
    const DiffOps& ops,
    const RegularizerMatrix& W,
    double alpha,
    double rho,
    std::span<const Index> sources);

/// -A_V^T u + alpha/2 u^T W u
double fixed_source_objective(const DiffOps& ops, const SparseMatrix& W, double alpha, const Eigen::VectorXd& u);

/// Regularized distance to `sources` by ADMM with a prefactored u-step,
/// optional over-relaxation and penalty adaptation. When the iteration cap
/// is hit, the iterate with the smallest normalized residual is returned and
/// `converged` is false.
DistanceField solve_fixed_source(
    const DiffOps& ops,
    const RegularizerMatrix& W,
    std::span<const Index> sources,
    const AdmmSettings& settings);

} // namespace rgd
