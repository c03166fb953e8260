#include "support.hpp"

#include <rgd/cli.hpp>
#include <rgd/io.hpp>
#include <rgd/mesh_gen.hpp>

#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

using namespace rgd;

namespace {

struct Run
{
    int code = 0;
    std::string out, err;

    // "key value" lines of stdout
    std::map<std::string, std::string> fields() const
    {
        std::map<std::string, std::string> m;
        std::istringstream ss(out);
        for (std::string line; std::getline(ss, line);) {
            const auto space = line.find(' ');
            if (space != std::string::npos) m[line.substr(0, space)] = line.substr(space + 1);
        }
        return m;
    }
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "rgd");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

} // namespace

TEST_CASE("dist")
{
    const auto dir = test::scratch_dir("cli_dist");
    const TriMesh disk = make_disk(1.0, 8);
    test::write_obj(dir / "disk.obj", disk);
    const std::string mesh = (dir / "disk.obj").string();

    SUBCASE("boundary source writes one value per vertex")
    {
        const Run r = run({"dist", mesh, "--source", "boundary", "--alpha-hat", "0.05", "--out",
                           (dir / "u.csv").string(), "--svg", (dir / "iso.svg").string(), "--grad-out",
                           (dir / "g.csv").string()});
        CHECK(r.code == 0);
        const Eigen::VectorXd u = read_scalar_csv(dir / "u.csv");
        CHECK(u.size() == disk.num_vertices());
        CHECK(u.minCoeff() >= -1e-12);
        CHECK(u(0) > 0.8);
        CHECK(u(0) < 1.0);
        CHECK(read_scalar_csv(dir / "g.csv").size() == disk.num_faces());
        CHECK(std::filesystem::file_size(dir / "iso.svg") > 0);
        CHECK(r.fields().at("converged") == "yes");
        CHECK(r.fields().at("vertices") == std::to_string(disk.num_vertices()));
    }
    SUBCASE("vertex list and regularizer choices")
    {
        for (const std::string reg : {"dirichlet", "bilaplacian"}) {
            const Run r = run({"dist", mesh, "--source", "0", "--reg", reg, "--alpha-hat", "0.02", "--out",
                               (dir / "u.csv").string()});
            CHECK(r.code == 0);
            CHECK(read_scalar_csv(dir / "u.csv")(0) == 0.0);
        }
        const Run r = run({"dist", mesh, "--source", "0,3", "--out", (dir / "u.csv").string()});
        CHECK(r.code == 0);
        CHECK(r.fields().at("sources") == "2");
    }
    SUBCASE("iteration cap gives exit 2 and still writes output")
    {
        const Run r = run({"dist", mesh, "--source", "0", "--max-iter", "3", "--out", (dir / "capped.csv").string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("max_iter") != std::string::npos);
        CHECK(read_scalar_csv(dir / "capped.csv").size() == disk.num_vertices());
    }
    SUBCASE("invalid input gives exit 1")
    {
        CHECK(run({"dist", mesh, "--source", "100000"}).code == 1);
        CHECK(run({"dist", mesh, "--source", "1,x"}).code == 1);
        CHECK(run({"dist", mesh, "--source", "0", "--reg", "nope"}).code == 1);
        CHECK(run({"dist", mesh, "--source", "0", "--reg", "vfa"}).code == 1);
        CHECK(run({"dist", mesh, "--source", "0", "--alpha-hat", "-1"}).code == 1);
        CHECK(run({"dist", (dir / "missing.obj").string(), "--source", "0"}).code == 1);
        const Run r = run({"dist", mesh});
        CHECK(r.code == 1);
        CHECK_FALSE(r.err.empty());
        CHECK(run({}).code == 1);
        CHECK(run({"--help"}).code == 0);
    }
}

TEST_CASE("oracle")
{
    const Run circle = run({"oracle", "circle", "--alpha", "0.5", "--n", "1000"});
    CHECK(circle.code == 0);
    CHECK(std::stod(circle.fields().at("max_err")) <= 0.01);

    const Run report = run({"oracle", "ring1d", "--alpha", "0.3333333333333333", "--n", "400", "--report"});
    CHECK(report.code == 0);
    CHECK(report.fields().count("u_pi") == 1);
    CHECK(std::stod(report.fields().at("max_err")) <= 0.02);

    const Run disk = run({"oracle", "disk", "--alpha", "0.1", "--n", "12", "--report"});
    CHECK(disk.code == 0);
    CHECK(std::stod(disk.fields().at("max_error_pct")) <= 5.0);

    CHECK(run({"oracle", "sphere", "--alpha", "0.5"}).code == 1);
    CHECK(run({"oracle", "circle", "--alpha", "0"}).code == 1);
}

TEST_CASE("audit")
{
    const auto dir = test::scratch_dir("cli_audit");
    const Index n = 40;
    Eigen::MatrixXd D(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) D(i, j) = std::abs(static_cast<double>(i - j));
    }
    write_matrix_binary(dir / "line.rgdmat", D);
    D(0, n - 1) = D(n - 1, 0) = 1000.0;
    write_matrix_csv(dir / "bad.csv", D);

    const Run clean = run({"audit", (dir / "line.rgdmat").string(), "--area", "4"});
    CHECK(clean.code == 0);
    CHECK(clean.fields().at("mode") == "exhaustive");
    CHECK(clean.fields().at("violations") == "0");
    CHECK(std::stod(clean.fields().at("symmetry_max")) == 0.0);

    const Run bad = run({"audit", (dir / "bad.csv").string(), "--area", "4"});
    CHECK(bad.fields().at("violations") == std::to_string(n - 2));

    const std::vector<std::string> sampled = {"audit", (dir / "bad.csv").string(), "--area", "4", "--sampled",
                                              "--triplets", "5000", "--seed", "3"};
    const Run first = run(sampled);
    CHECK(first.fields().at("mode") == "sampled");
    CHECK(first.fields().at("triplets") == "5000");
    CHECK(run(sampled).out == first.out);

    const Run pair = run({"audit", (dir / "bad.csv").string(), "--area", "4", "--pair", "0", "39", "--pair-out",
                          (dir / "pair.csv").string()});
    CHECK(pair.code == 0);
    CHECK(pair.fields().at("pair_violating") == std::to_string(n - 2));
    CHECK(read_scalar_csv(dir / "pair.csv").size() == n);

    CHECK(run({"audit", (dir / "line.rgdmat").string(), "--area", "4", "--pair", "0", "40"}).code == 1);
    CHECK(run({"audit", (dir / "line.rgdmat").string(), "--area", "0"}).code == 1);
}

TEST_CASE("field and vfa distance")
{
    const auto dir = test::scratch_dir("cli_field");
    const TriMesh grid = make_grid(2.0, 1.0, 8, 4);
    test::write_obj(dir / "grid.obj", grid);
    test::write_text(dir / "c.txt", "0 1 0 0\n40 1 0 0\n");
    const std::string mesh = (dir / "grid.obj").string();

    const Run field = run({"field", mesh, "--constraints", (dir / "c.txt").string(), "--out",
                           (dir / "field.csv").string()});
    CHECK(field.code == 0);
    const Eigen::MatrixX3d V = read_vector_csv(dir / "field.csv");
    REQUIRE(V.rows() == grid.num_faces());
    CHECK((V.col(0).cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-6);

    const Run localized = run({"field", mesh, "--constraints", (dir / "c.txt").string(), "--sigma", "0.3",
                               "--out", (dir / "local.csv").string()});
    CHECK(localized.code == 0);
    CHECK(read_vector_csv(dir / "local.csv").rowwise().norm().maxCoeff() <= 1.0 + 1e-12);

    const Run dist = run({"dist", mesh, "--source", "0", "--reg", "vfa", "--field", (dir / "field.csv").string(),
                          "--beta", "10", "--alpha-hat", "0.05", "--out", (dir / "u.csv").string()});
    CHECK(dist.code == 0);

    test::write_text(dir / "broken.txt", "0 1 0\n");
    CHECK(run({"field", mesh, "--constraints", (dir / "broken.txt").string(), "--out", (dir / "x.csv").string()})
              .code
          == 1);
}

TEST_CASE("allpairs")
{
    const auto dir = test::scratch_dir("cli_allpairs");
    const TriMesh grid = make_grid(1.0, 1.0, 3, 3);
    test::write_obj(dir / "grid.obj", grid);
    const Run r = run({"allpairs", (dir / "grid.obj").string(), "--alpha-hat", "0.1", "--out",
                       (dir / "D.rgdmat").string(), "--csv", (dir / "D.csv").string()});
    CHECK((r.code == 0 || r.code == 2));
    const Eigen::MatrixXd D = read_matrix(dir / "D.rgdmat");
    CHECK(D.rows() == grid.num_vertices());
    CHECK(D.cols() == grid.num_vertices());
    CHECK((D - D.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((read_matrix(dir / "D.csv") - D).cwiseAbs().maxCoeff() <= 1e-15 * D.maxCoeff());

    const Run capped = run({"allpairs", (dir / "grid.obj").string(), "--max-iter", "2", "--out",
                            (dir / "D2.rgdmat").string()});
    CHECK(capped.code == 2);
    CHECK(run({"allpairs", (dir / "grid.obj").string(), "--cap", "5"}).code == 1);
}
