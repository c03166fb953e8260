#include <rgd/allpairs.hpp>
#include <rgd/cli.hpp>
#include <rgd/error.hpp>
#include <rgd/io.hpp>
#include <rgd/isolines.hpp>
#include <rgd/line_field.hpp>
#include <rgd/mesh_gen.hpp>
#include <rgd/metrics.hpp>
#include <rgd/oracles.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace rgd {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNotConverged = 2;

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<Index> parse_sources(const std::string& text, const TriMesh& mesh)
{
    if (text == "boundary") {
        auto b = boundary_vertices(mesh);
        if (b.empty()) throw ValidationError("--source boundary: the mesh has no boundary");
        return b;
    }
    std::vector<Index> out;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (tok.empty() || used != tok.size()) throw ValidationError("malformed source index '" + tok + "'");
        if (v < 0 || v >= mesh.num_vertices()) {
            throw ValidationError("source index " + tok + " outside [0, " + std::to_string(mesh.num_vertices()) + ")");
        }
        out.push_back(static_cast<Index>(v));
    }
    if (out.empty()) throw ValidationError("--source is empty");
    return out;
}

struct DistOptions
{
    std::string mesh, source, reg = "dirichlet", field, out = "u.csv", svg, grad_out;
    double alpha_hat = 0.0, beta = 1.0, external_exponent = kHessianExponent;
    int levels = 10, svg_axis = 2;
    AdmmSettings admm;
};

struct AllPairsOptions
{
    std::string mesh, out = "D.rgdmat", csv;
    AllPairsSettings settings;
};

struct OracleOptions
{
    std::string kind;
    double alpha = 0.0;
    int n = 0;
    bool report = false;
    std::optional<double> eps_abs, eps_rel;
};

struct AuditOptions
{
    std::string matrix;
    double area = 0.0;
    std::uint64_t triplets = 100000, seed = 0;
    bool sampled = false;
    std::vector<long long> pair;
    std::string pair_out;
};

struct FieldOptions
{
    std::string mesh, constraints, out, centers;
    std::optional<double> sigma;
};

void add_admm_flags(CLI::App* cmd, AdmmSettings& s)
{
    cmd->add_option("--eps-abs", s.eps_abs, "absolute stopping tolerance")->capture_default_str();
    cmd->add_option("--eps-rel", s.eps_rel, "relative stopping tolerance")->capture_default_str();
    cmd->add_option("--max-iter", s.max_iter, "iteration cap")->capture_default_str();
    cmd->add_option("--rho", s.rho, "ADMM penalty")->capture_default_str();
    cmd->add_option("--over-relaxation", s.over_relaxation, "eta in [1, 1.8]")->capture_default_str();
    cmd->add_flag("--penalty-adapt", s.penalty_adapt, "residual-balancing penalty updates");
}

int run_dist(const DistOptions& o, std::ostream& out, std::ostream& err)
{
    const TriMesh mesh = load_mesh(o.mesh);
    const DiffOps ops = build_ops(mesh);
    const std::vector<Index> sources = parse_sources(o.source, mesh);

    RegularizerMatrix W;
    if (o.reg == "dirichlet") {
        W = dirichlet_matrix(ops);
    } else if (o.reg == "vfa") {
        if (o.field.empty()) throw ValidationError("--reg vfa needs --field <field.csv>");
        W = vfa_matrix(ops, read_vector_csv(o.field), o.beta);
    } else if (o.reg == "bilaplacian") {
        W = bilaplacian_matrix(ops);
    } else if (o.reg.rfind("external:", 0) == 0) {
        W = external_matrix(o.reg.substr(9), mesh.num_vertices(), o.external_exponent);
    } else {
        throw ValidationError("unknown regularizer '" + o.reg + "'");
    }

    AdmmSettings settings = o.admm;
    settings.alpha_hat = o.alpha_hat;
    const DistanceField d = solve_fixed_source(ops, W, sources, settings);
    write_scalar_csv(o.out, d.u);

    const Eigen::VectorXd gnorm = gradient_norm_field(ops, d.u);
    if (!o.grad_out.empty()) write_scalar_csv(o.grad_out, gnorm);
    if (!o.svg.empty()) {
        const IsolineSet iso = extract_isolines(mesh, d.u, o.levels);
        if (!iso.warning.empty()) err << "warning: " << iso.warning << '\n';
        export_svg(iso, o.svg, o.svg_axis);
    }

    out << "vertices " << mesh.num_vertices() << "\nfaces " << mesh.num_faces() << "\nsources " << d.sources.size()
        << "\nalpha " << fmt(d.alpha) << "\niterations " << d.iterations << "\nconverged "
        << (d.converged ? "yes" : "no") << "\nmax_u " << fmt(d.u.maxCoeff()) << "\nmax_grad "
        << fmt(gnorm.size() ? gnorm.maxCoeff() : 0.0) << '\n';
    if (!d.converged) {
        err << "warning: ADMM stopped at max_iter; wrote the best iterate\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

int run_allpairs(const AllPairsOptions& o, std::ostream& out, std::ostream& err)
{
    const TriMesh mesh = load_mesh(o.mesh);
    const DiffOps ops = build_ops(mesh);
    const auto t0 = std::chrono::steady_clock::now();
    const DistanceMatrix r = solve_all_pairs(ops, o.settings);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_matrix_binary(o.out, r.D);
    if (!o.csv.empty()) write_matrix_csv(o.csv, r.D);
    const SymmetryStats sym = symmetry_error(r.D, ops.total_area);
    out << "vertices " << mesh.num_vertices() << "\nalpha " << fmt(r.alpha) << "\niterations " << r.iterations
        << "\nconverged " << (r.converged ? "yes" : "no") << "\nfactorizations " << r.factorizations
        << "\nmirror_gap " << fmt(r.max_mirror_gap) << "\nsymmetry_max " << fmt(sym.max) << "\nmax_entry "
        << fmt(r.D.maxCoeff()) << "\nseconds " << fmt(seconds) << '\n';
    if (!r.converged) {
        err << "warning: all-pairs ADMM stopped at max_iter; wrote the best iterate\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

int run_oracle(const OracleOptions& o, std::ostream& out, std::ostream&)
{
    const auto t0 = std::chrono::steady_clock::now();
    double max_err = 0.0;
    bool converged = true;
    std::vector<std::pair<std::string, std::string>> details;

    if (o.kind == "circle" || o.kind == "ring1d") {
        const int n = o.n > 0 ? o.n : 1000;
        const RingKind kind = o.kind == "circle" ? RingKind::dirichlet : RingKind::bilaplacian;
        AdmmSettings s = ring_oracle_settings();
        if (o.eps_abs) s.eps_abs = *o.eps_abs;
        if (o.eps_rel) s.eps_rel = *o.eps_rel;
        const DistanceField d = solve_ring_1d(n, o.alpha, kind, 0, s);
        const Ring1D ring = make_ring(n);
        max_err = ring_sup_error(ring, d.u, o.alpha, kind, 0);
        converged = d.converged;
        details.emplace_back("nodal_err", fmt(ring_max_error(ring, d.u, o.alpha, kind, 0)));
        details.emplace_back("iterations", std::to_string(d.iterations));
        if (n % 2 == 0) {
            const double exact = kind == RingKind::dirichlet ? circle_dirichlet_exact(std::numbers::pi, o.alpha)
                                                             : circle_hessian_exact(std::numbers::pi, o.alpha);
            details.emplace_back("u_pi", fmt(d.u(n / 2)));
            details.emplace_back("exact_pi", fmt(exact));
        }
    } else if (o.kind == "disk") {
        const int rings = o.n > 0 ? o.n : 41;
        const TriMesh mesh = make_disk(1.0, rings);
        const DiffOps ops = build_ops(mesh);
        AdmmSettings s = strict_settings();
        if (o.eps_abs) s.eps_abs = *o.eps_abs;
        if (o.eps_rel) s.eps_rel = *o.eps_rel;
        s.alpha_hat = o.alpha;
        s.alpha_mode = AlphaMode::raw;
        const DistanceField d = solve_fixed_source(ops, dirichlet_matrix(ops), boundary_vertices(mesh), s);
        Eigen::VectorXd exact(mesh.num_vertices());
        for (Index v = 0; v < mesh.num_vertices(); ++v) {
            exact(v) = disk_exact(std::min(mesh.position(v).norm(), 1.0), o.alpha, 1.0);
        }
        max_err = (d.u - exact).cwiseAbs().maxCoeff();
        converged = d.converged;
        details.emplace_back("faces", std::to_string(mesh.num_faces()));
        details.emplace_back("max_error_pct", fmt(max_error_vs(d.u, exact)));
        details.emplace_back("u_center", fmt(d.u(0)));
        details.emplace_back("exact_center", fmt(1.0 - o.alpha));
        details.emplace_back("iterations", std::to_string(d.iterations));
        details.emplace_back("max_grad", fmt(gradient_norm_field(ops, d.u).maxCoeff()));
    } else {
        throw ValidationError("unknown oracle '" + o.kind + "' (circle, disk, ring1d)");
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    out << "max_err " << fmt(max_err) << '\n';
    if (o.report) {
        for (const auto& [k, v] : details) out << k << ' ' << v << '\n';
        out << "converged " << (converged ? "yes" : "no") << "\nseconds " << fmt(seconds) << '\n';
    }
    return converged ? kExitOk : kExitNotConverged;
}

int run_audit(const AuditOptions& o, std::ostream& out, std::ostream&)
{
    const Eigen::MatrixXd D = read_matrix(o.matrix);
    if (D.rows() != D.cols()) throw ValidationError("distance matrix must be square");
    const SymmetryStats sym = symmetry_error(D, o.area);
    out << "n " << D.rows() << "\nsymmetry_max " << fmt(sym.max) << "\nsymmetry_mean " << fmt(sym.mean) << '\n';
    if (!o.pair.empty()) {
        if (o.pair[0] < 0 || o.pair[1] < 0 || o.pair[0] >= D.rows() || o.pair[1] >= D.rows()) {
            throw ValidationError("--pair index out of range");
        }
        const Eigen::VectorXd v = pair_violation(D, o.pair[0], o.pair[1]);
        out << "pair " << o.pair[0] << ' ' << o.pair[1] << "\npair_max " << fmt(v.maxCoeff()) << "\npair_violating "
            << (v.array() > 0.0).count() << '\n';
        if (!o.pair_out.empty()) write_scalar_csv(o.pair_out, v);
        return kExitOk;
    }
    const TriangleAudit a = triangle_audit(D, o.triplets, o.seed, o.sampled ? AuditMode::sampled : AuditMode::automatic);
    out << "mode " << (a.exhaustive ? "exhaustive" : "sampled") << "\ntriplets " << a.triplets << "\nviolations "
        << a.violations << "\nviolation_pct " << fmt(a.violation_pct) << "\nmax_violation " << fmt(a.max_violation)
        << "\nslack " << fmt(a.slack) << '\n';
    return kExitOk;
}

int run_field(const FieldOptions& o, std::ostream& out, std::ostream&)
{
    const TriMesh mesh = load_mesh(o.mesh);
    const auto constraints = read_constraints(o.constraints);
    const LineField field = interpolate_line_field(mesh, constraints);
    Eigen::MatrixX3d result = field.directions;
    if (o.sigma) {
        const DiffOps ops = build_ops(mesh);
        const std::vector<Index> centers =
            o.centers.empty() ? constraint_vertices(mesh, constraints) : parse_sources(o.centers, mesh);
        result = localize_field(mesh, ops, field, centers, *o.sigma, strict_settings());
    }
    write_vector_csv(o.out, result);
    out << "faces " << mesh.num_faces() << "\nconstraints " << constraints.size() << '\n';
    return kExitOk;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Regularized geodesic distances on triangle meshes"};
    app.require_subcommand(1);

    DistOptions dist;
    auto* dist_cmd = app.add_subcommand("dist", "distance field from a source set");
    dist_cmd->add_option("mesh", dist.mesh, "OBJ or OFF mesh")->required();
    dist_cmd->add_option("--source", dist.source, "vertex list 'i,j,...' or 'boundary'")->required();
    dist_cmd->add_option("--reg", dist.reg, "dirichlet | vfa | bilaplacian | external:PATH")->capture_default_str();
    dist_cmd->add_option("--alpha-hat", dist.alpha_hat, "scale-invariant smoothing weight")->capture_default_str();
    dist_cmd->add_option("--beta", dist.beta, "alignment weight for vfa")->capture_default_str();
    dist_cmd->add_option("--field", dist.field, "per-face line field CSV for vfa");
    dist_cmd->add_option("--external-exponent", dist.external_exponent, "area exponent e for external W")
        ->capture_default_str();
    dist_cmd->add_option("--out", dist.out, "output CSV")->capture_default_str();
    dist_cmd->add_option("--svg", dist.svg, "isoline plot");
    dist_cmd->add_option("--levels", dist.levels, "isoline count")->capture_default_str();
    dist_cmd->add_option("--svg-axis", dist.svg_axis, "coordinate dropped by the projection")->capture_default_str();
    dist_cmd->add_option("--grad-out", dist.grad_out, "per-face gradient norm CSV");
    add_admm_flags(dist_cmd, dist.admm);

    AllPairsOptions ap;
    auto* ap_cmd = app.add_subcommand("allpairs", "symmetric all-pairs distance matrix");
    ap_cmd->add_option("mesh", ap.mesh, "OBJ or OFF mesh")->required();
    ap_cmd->add_option("--alpha-hat", ap.settings.alpha_hat, "scale-invariant smoothing weight")
        ->capture_default_str();
    ap_cmd->add_option("--out", ap.out, "RGDMAT01 output")->capture_default_str();
    ap_cmd->add_option("--csv", ap.csv, "also write a CSV matrix");
    ap_cmd->add_option("--cap", ap.settings.cap, "largest vertex count")->capture_default_str();
    ap_cmd->add_option("--eps-abs", ap.settings.eps_abs, "absolute stopping tolerance")->capture_default_str();
    ap_cmd->add_option("--eps-rel", ap.settings.eps_rel, "relative stopping tolerance")->capture_default_str();
    ap_cmd->add_option("--max-iter", ap.settings.max_iter, "iteration cap")->capture_default_str();

    OracleOptions oracle;
    auto* oracle_cmd = app.add_subcommand("oracle", "numerical vs closed-form error");
    oracle_cmd->add_option("kind", oracle.kind, "circle | disk | ring1d")->required();
    oracle_cmd->add_option("--alpha", oracle.alpha, "raw smoothing weight")->required();
    oracle_cmd->add_option("--n", oracle.n, "ring samples (circle, ring1d) or disk rings");
    oracle_cmd->add_flag("--report", oracle.report, "print diagnostics");
    oracle_cmd->add_option("--eps-abs", oracle.eps_abs, "override the absolute tolerance");
    oracle_cmd->add_option("--eps-rel", oracle.eps_rel, "override the relative tolerance");

    AuditOptions audit;
    auto* audit_cmd = app.add_subcommand("audit", "symmetry and triangle-inequality audit");
    audit_cmd->add_option("matrix", audit.matrix, "RGDMAT01 or CSV matrix")->required();
    audit_cmd->add_option("--area", audit.area, "total surface area")->required();
    audit_cmd->add_option("--triplets", audit.triplets, "sample size when n > 300")->capture_default_str();
    audit_cmd->add_option("--seed", audit.seed, "sampling seed")->capture_default_str();
    audit_cmd->add_flag("--sampled", audit.sampled, "sample triplets even when n <= 300");
    audit_cmd->add_option("--pair", audit.pair, "fixed pair i j")->expected(2);
    audit_cmd->add_option("--pair-out", audit.pair_out, "per-vertex pair violation CSV");

    FieldOptions field;
    auto* field_cmd = app.add_subcommand("field", "interpolate a line field from sparse constraints");
    field_cmd->add_option("mesh", field.mesh, "OBJ or OFF mesh")->required();
    field_cmd->add_option("--constraints", field.constraints, "'face dx dy dz' lines")->required();
    field_cmd->add_option("--sigma", field.sigma, "geodesic Gaussian width");
    field_cmd->add_option("--centers", field.centers, "localization centers (default: constrained faces)");
    field_cmd->add_option("--out", field.out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*dist_cmd) return run_dist(dist, out, err);
        if (*ap_cmd) return run_allpairs(ap, out, err);
        if (*oracle_cmd) return run_oracle(oracle, out, err);
        if (*audit_cmd) return run_audit(audit, out, err);
        if (*field_cmd) return run_field(field, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}

} // namespace rgd
