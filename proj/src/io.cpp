#include <rgd/error.hpp>
#include <rgd/io.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace rgd {

namespace {

constexpr char kMagic[8] = {'R', 'G', 'D', 'M', 'A', 'T', '0', '1'};

std::string format_double(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false)
{
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false)
{
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw ValidationError("cannot open " + path.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& text)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(text);
    while (std::getline(ss, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
    }
    return cells;
}

double to_double(const std::string& token, std::size_t line)
{
    if (token.empty()) throw ParseError("empty CSV cell", line);
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) throw ParseError("expected a number, got '" + token + "'", line);
    return value;
}

bool is_header(const std::string& text)
{
    for (char c : text) {
        if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E') return true;
    }
    return false;
}

// Rows of numeric cells; a first line containing letters is treated as a header.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line == 1 && is_header(text)) continue;
        std::vector<double> row;
        for (const auto& cell : split_csv(text)) row.push_back(to_double(cell, line));
        rows.push_back(std::move(row));
    }
    return rows;
}

void put_u64(std::ostream& out, std::uint64_t v)
{
    std::array<char, 8> bytes;
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xff);
    out.write(bytes.data(), 8);
}

std::uint64_t get_u64(std::istream& in)
{
    std::array<unsigned char, 8> bytes;
    if (!in.read(reinterpret_cast<char*>(bytes.data()), 8)) {
        throw ValidationError("truncated RGDMAT01 stream");
    }
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    return v;
}

} // namespace

void write_scalar_csv(const std::filesystem::path& path, const Eigen::VectorXd& values)
{
    std::ofstream out = open_out(path);
    out << "index,value\n";
    for (Eigen::Index i = 0; i < values.size(); ++i) out << i << ',' << format_double(values(i)) << '\n';
    if (!out) throw ValidationError("write failed: " + path.string());
}

Eigen::VectorXd read_scalar_csv(const std::filesystem::path& path)
{
    const auto rows = read_numeric_csv(path);
    Eigen::VectorXd values(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != 2 || rows[r][0] != static_cast<double>(r)) {
            throw ValidationError("scalar CSV row " + std::to_string(r) + " is not 'index,value' in order");
        }
        values(static_cast<Eigen::Index>(r)) = rows[r][1];
    }
    return values;
}

void write_vector_csv(const std::filesystem::path& path, const Eigen::MatrixX3d& values)
{
    std::ofstream out = open_out(path);
    out << "face,x,y,z\n";
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << i;
        for (int c = 0; c < 3; ++c) out << ',' << format_double(values(i, c));
        out << '\n';
    }
    if (!out) throw ValidationError("write failed: " + path.string());
}

Eigen::MatrixX3d read_vector_csv(const std::filesystem::path& path)
{
    const auto rows = read_numeric_csv(path);
    Eigen::MatrixX3d values(static_cast<Eigen::Index>(rows.size()), 3);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != 4 || rows[r][0] != static_cast<double>(r)) {
            throw ValidationError("vector CSV row " + std::to_string(r) + " is not 'face,x,y,z' in order");
        }
        for (int c = 0; c < 3; ++c) values(static_cast<Eigen::Index>(r), c) = rows[r][c + 1];
    }
    return values;
}

void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& D)
{
    if (D.rows() != D.cols()) throw ValidationError("RGDMAT01 stores square matrices only");
    out.write(kMagic, 8);
    put_u64(out, static_cast<std::uint64_t>(D.rows()));
    for (Eigen::Index i = 0; i < D.rows(); ++i) {
        for (Eigen::Index j = 0; j < D.cols(); ++j) put_u64(out, std::bit_cast<std::uint64_t>(D(i, j)));
    }
}

Eigen::MatrixXd read_matrix_binary(std::istream& in)
{
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
        throw ValidationError("not an RGDMAT01 file (bad magic)");
    }
    const std::uint64_t n = get_u64(in);
    if (n > (1u << 20)) throw ValidationError("RGDMAT01 dimension " + std::to_string(n) + " is implausible");
    Eigen::MatrixXd D(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < D.rows(); ++i) {
        for (Eigen::Index j = 0; j < D.cols(); ++j) D(i, j) = std::bit_cast<double>(get_u64(in));
    }
    return D;
}

void write_matrix_binary(const std::filesystem::path& path, const Eigen::MatrixXd& D)
{
    std::ofstream out = open_out(path, true);
    write_matrix_binary(out, D);
    if (!out) throw ValidationError("write failed: " + path.string());
}

Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path, true);
    return read_matrix_binary(in);
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& D)
{
    std::ofstream out = open_out(path);
    for (Eigen::Index i = 0; i < D.rows(); ++i) {
        for (Eigen::Index j = 0; j < D.cols(); ++j) {
            if (j) out << ',';
            out << format_double(D(i, j));
        }
        out << '\n';
    }
    if (!out) throw ValidationError("write failed: " + path.string());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path)
{
    const auto rows = read_numeric_csv(path);
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd D(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != n) {
            throw ValidationError("matrix CSV is not square (row " + std::to_string(i) + ")");
        }
        for (Eigen::Index j = 0; j < n; ++j) D(i, j) = rows[i][j];
    }
    return D;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv" ? read_matrix_csv(path) : read_matrix_binary(path);
}

} // namespace rgd
