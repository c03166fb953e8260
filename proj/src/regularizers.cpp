#include <rgd/error.hpp>
#include <rgd/regularizers.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace rgd {

std::string to_string(RegularizerKind kind)
{
    switch (kind) {
    case RegularizerKind::dirichlet: return "dirichlet";
    case RegularizerKind::vfa: return "vfa";
    case RegularizerKind::bilaplacian: return "bilaplacian";
    case RegularizerKind::external: return "external";
    }
    return "unknown";
}

RegularizerMatrix dirichlet_matrix(const DiffOps& ops)
{
    return {ops.laplacian, RegularizerKind::dirichlet, kFirstOrderExponent};
}

RegularizerMatrix vfa_matrix(const DiffOps& ops, const Eigen::MatrixX3d& field, double beta)
{
    if (!(beta >= 0.0)) throw ValidationError("vfa beta must be non-negative");
    if (ops.grad_dim != 3) throw ValidationError("vfa needs 3D face gradients");
    if (field.rows() != ops.num_faces()) {
        throw ValidationError(
            "line field has " + std::to_string(field.rows()) + " rows, mesh has "
            + std::to_string(ops.num_faces()) + " faces");
    }
    if (!field.allFinite()) throw ValidationError("line field has non-finite entries");

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(9 * ops.num_faces());
    for (Index f = 0; f < ops.num_faces(); ++f) {
        const Eigen::Vector3d v = field.row(f).transpose();
        const Eigen::Matrix3d block = ops.face_areas(f) * (v * v.transpose());
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) entries.emplace_back(3 * f + r, 3 * f + c, block(r, c));
        }
    }
    SparseMatrix aligned(3 * ops.num_faces(), 3 * ops.num_faces());
    aligned.setFromTriplets(entries.begin(), entries.end());

    const SparseMatrix grad_t = ops.grad.transpose();
    SparseMatrix anisotropic = grad_t * aligned * ops.grad;
    return {ops.laplacian + beta * anisotropic, RegularizerKind::vfa, kFirstOrderExponent};
}

RegularizerMatrix bilaplacian_matrix(const DiffOps& ops)
{
    if ((ops.vertex_areas.array() <= 0.0).any()) {
        throw ValidationError("bilaplacian needs positive vertex areas (isolated vertex?)");
    }
    const Eigen::VectorXd inv_mass = ops.vertex_areas.cwiseInverse();
    SparseMatrix W = ops.laplacian * inv_mass.asDiagonal() * ops.laplacian;
    return {W, RegularizerKind::bilaplacian, kHessianExponent};
}

RegularizerMatrix parse_external_matrix(std::istream& in, Index n, double scale_exponent)
{
    std::vector<Eigen::Triplet<double>> entries;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
        std::istringstream ss(text);
        long long i = 0, j = 0;
        double value = 0.0;
        if (!(ss >> i)) continue;
        if (!(ss >> j >> value)) throw ParseError("expected 'i j value'", line);
        std::string extra;
        if (ss >> extra) throw ParseError("trailing content after 'i j value'", line);
        if (i < 0 || j < 0 || i >= n || j >= n) {
            throw ValidationError(
                "matrix entry (" + std::to_string(i) + ", " + std::to_string(j)
                + ") outside a " + std::to_string(n) + " x " + std::to_string(n) + " matrix (line "
                + std::to_string(line) + ")");
        }
        if (!std::isfinite(value)) throw ParseError("non-finite matrix value", line);
        entries.emplace_back(static_cast<Index>(i), static_cast<Index>(j), value);
    }
    SparseMatrix W(n, n);
    W.setFromTriplets(entries.begin(), entries.end());

    const double scale = W.nonZeros() ? Eigen::VectorXd(W.coeffs()).cwiseAbs().maxCoeff() : 0.0;
    const SparseMatrix asym = W - SparseMatrix(W.transpose());
    for (Index k = 0; k < asym.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(asym, k); it; ++it) {
            if (std::abs(it.value()) > 1e-8 * scale) {
                throw ValidationError(
                    "external matrix is not symmetric at (" + std::to_string(it.row()) + ", "
                    + std::to_string(it.col()) + ")");
            }
        }
    }
    return {W, RegularizerKind::external, scale_exponent};
}

RegularizerMatrix external_matrix(const std::filesystem::path& path, Index n, double scale_exponent)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open matrix file " + path.string());
    return parse_external_matrix(in, n, scale_exponent);
}

} // namespace rgd
