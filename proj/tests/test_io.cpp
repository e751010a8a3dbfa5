#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lrr/io.hpp"
#include "testutil.hpp"

using lrr::Mat;
namespace fs = std::filesystem;
namespace io = lrr::io;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "lrr_io_test")
    {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("matrix csv round trip with header")
{
    TempDir dir;
    const Mat m = testutil::random_mat(5, 3, 2);
    io::save_matrix_csv(m, dir.file("m.csv"));
    const Mat back = io::load_matrix_csv(dir.file("m.csv"));
    CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv parser rejects bad input")
{
    TempDir dir;
    {
        std::ofstream out(dir.file("ragged.csv"));
        out << "1,2,3\n4,5\n";
    }
    CHECK_THROWS_AS(io::load_matrix_csv(dir.file("ragged.csv")), io::IoError);
    {
        std::ofstream out(dir.file("nonnum.csv"));
        out << "1,two\n";
    }
    CHECK_THROWS_AS(io::load_matrix_csv(dir.file("nonnum.csv")), io::IoError);
    CHECK_THROWS_AS(io::load_matrix_csv(dir.file("missing.csv")), io::IoError);
    {
        std::ofstream out(dir.file("badheader.csv"));
        out << "# 3 2\n1,2\n";
    }
    CHECK_THROWS_AS(io::load_matrix_csv(dir.file("badheader.csv")), io::IoError);
}

TEST_CASE("pgm load-save-load is the identity on floats")
{
    TempDir dir;
    Mat img(3, 4);
    for (Eigen::Index i = 0; i < img.size(); ++i)
        img(i / 4, i % 4) = static_cast<double>((i * 37) % 256) / 255.0;
    io::save_pgm(img, dir.file("a.pgm"));
    const Mat once = io::load_pgm(dir.file("a.pgm"));
    io::save_pgm(once, dir.file("b.pgm"));
    const Mat twice = io::load_pgm(dir.file("b.pgm"));
    CHECK((once - twice).cwiseAbs().maxCoeff() == 0.0);
    CHECK((once - img).cwiseAbs().maxCoeff() <= 0.5 / 255.0);
}

TEST_CASE("ascii pgm parses like binary")
{
    TempDir dir;
    {
        std::ofstream out(dir.file("p2.pgm"));
        out << "P2\n# a comment\n2 2\n255\n0 128\n255 64\n";
    }
    const Mat m = io::load_pgm(dir.file("p2.pgm"));
    CHECK(m(0, 0) == 0.0);
    CHECK(m(0, 1) == doctest::Approx(128.0 / 255.0));
    CHECK(m(1, 0) == 1.0);

    {
        std::ofstream out(dir.file("max64.pgm"));
        out << "P2\n2 1\n64\n0 64\n";
    }
    CHECK_THROWS_AS(io::load_pgm(dir.file("max64.pgm")), io::IoError);
}

TEST_CASE("drop mask is binary deterministic and hits the rate")
{
    const Mat m1 = io::make_drop_mask(40, 40, 0.5, 9);
    const Mat m2 = io::make_drop_mask(40, 40, 0.5, 9);
    CHECK((m1 - m2).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < m1.rows(); ++i)
        for (Eigen::Index j = 0; j < m1.cols(); ++j)
            CHECK((m1(i, j) == 0.0 || m1(i, j) == 1.0));
    const double kept = m1.sum() / static_cast<double>(m1.size());
    CHECK(kept > 0.4);
    CHECK(kept < 0.6);
}

TEST_CASE("solve report csv round trip")
{
    TempDir dir;
    lrr::SolveReport report;
    report.iterates = {{0, 10.0, 2.5, 12.5}, {10, 4.0, 2.0, 6.0}, {20, 3.0, 1.5, 4.5}};
    io::save_solve_report_csv(report, dir.file("r.csv"));
    const auto rows = io::load_solve_report_csv(dir.file("r.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].iteration == 10);
    CHECK(rows[1].data_loss == 4.0);
    CHECK(rows[2].total == 4.5);
}

TEST_CASE("psnr of an exact match is infinite-ish and of a known error is exact")
{
    Mat a = Mat::Zero(2, 2);
    Mat b = Mat::Constant(2, 2, 0.1);
    // MSE = 0.01 -> 10 log10(100) = 20 dB
    CHECK(io::psnr(a, b) == doctest::Approx(20.0));
}
