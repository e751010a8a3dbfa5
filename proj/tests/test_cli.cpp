#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "lrr/io.hpp"
#include "testutil.hpp"

// End-to-end checks against the built binary (path from $LRR_BIN), covering
// the exit-code contract and byte-level determinism of output files.

namespace fs = std::filesystem;
using lrr::Mat;

namespace {

std::string binary()
{
    const char* bin = std::getenv("LRR_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "LRR_BIN must point at the CLI binary");
    return bin;
}

struct RunResult {
    int exit_code;
    std::string output; // stdout + stderr
};

RunResult run(const std::string& args)
{
    const std::string cmd = binary() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 512> buf{};
    while (fgets(buf.data(), buf.size(), pipe))
        output += buf.data();
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("lrr_cli_" + std::to_string(::getpid())))
    {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

double parse_field(const std::string& output, const std::string& key)
{
    const auto pos = output.find(key);
    REQUIRE_MESSAGE(pos != std::string::npos, "missing field " << key << " in:\n" << output);
    return std::stod(output.substr(pos + key.size()));
}

} // namespace

TEST_CASE("estimate rank of the identity fixture")
{
    TempDir dir;
    lrr::io::save_matrix_csv(Mat::Identity(4, 4), dir.file("id4.csv"));
    const auto r = run("estimate --input " + dir.file("id4.csv")
                       + " --stat rank --samples 2000 --seed 1 --oracle");
    CHECK(r.exit_code == 0);
    CHECK(parse_field(r.output, "oracle") == 4.0);
    CHECK(std::abs(parse_field(r.output, "estimate") - 4.0) <= 0.5);
}

TEST_CASE("estimate nuclear norm of diag(3,4)")
{
    TempDir dir;
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 3;
    d(1, 1) = 4;
    lrr::io::save_matrix_csv(d, dir.file("diag34.csv"));
    const auto r = run("estimate --input " + dir.file("diag34.csv")
                       + " --stat nuclear --samples 10000 --seed 1 --oracle");
    CHECK(r.exit_code == 0);
    CHECK(parse_field(r.output, "oracle") == doctest::Approx(7.0));
    CHECK(std::abs(parse_field(r.output, "estimate") - 7.0) <= 0.3);
}

TEST_CASE("missing input file exits 2 and names the path")
{
    const auto r = run("estimate --input /nonexistent/m.csv --stat rank");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("/nonexistent/m.csv") != std::string::npos);
}

TEST_CASE("complete with full observation and lambda 0 round-trips the image")
{
    TempDir dir;
    Mat img(6, 5);
    for (Eigen::Index i = 0; i < img.rows(); ++i)
        for (Eigen::Index j = 0; j < img.cols(); ++j)
            img(i, j) = static_cast<double>((7 * i + 3 * j) % 256) / 255.0;
    lrr::io::save_pgm(img, dir.file("in.pgm"));

    const auto r = run("complete --image " + dir.file("in.pgm") + " --lambda 0 --iters 1 --out "
                       + dir.file("out.pgm") + " --report " + dir.file("rep.csv"));
    CHECK(r.exit_code == 0);
    CHECK(slurp(dir.file("out.pgm")) == slurp(dir.file("in.pgm")));

    const auto rows = lrr::io::load_solve_report_csv(dir.file("rep.csv"));
    REQUIRE(!rows.empty());
    CHECK(rows.front().data_loss == 0.0);
}

TEST_CASE("complete rejects a mask of the wrong shape")
{
    TempDir dir;
    lrr::io::save_pgm(Mat::Constant(4, 4, 0.5), dir.file("in.pgm"));
    lrr::io::save_matrix_csv(Mat::Ones(3, 3), dir.file("mask.csv"));
    const auto r = run("complete --image " + dir.file("in.pgm") + " --mask " + dir.file("mask.csv")
                       + " --iters 1 --out " + dir.file("out.pgm"));
    CHECK(r.exit_code == 2);
}

TEST_CASE("complete output files are byte-identical across reruns")
{
    TempDir dir;
    const Mat img = (testutil::random_mat(8, 8, 3).array().tanh() * 0.5 + 0.5).matrix();
    lrr::io::save_pgm(img, dir.file("in.pgm"));
    const std::string args = "complete --image " + dir.file("in.pgm")
                             + " --drop-frac 0.4 --mask-seed 7 --lambda 0.05 --iters 30 --seed 5";
    const auto r1 = run(args + " --out " + dir.file("a.pgm") + " --report " + dir.file("a.csv"));
    const auto r2 = run(args + " --out " + dir.file("b.pgm") + " --report " + dir.file("b.csv"));
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    CHECK(slurp(dir.file("a.pgm")) == slurp(dir.file("b.pgm")));
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
}

TEST_CASE("complete with a relaxed penalty and an out-of-range drop fraction")
{
    TempDir dir;
    lrr::io::save_pgm((testutil::random_mat(10, 10, 5).array().tanh() * 0.4 + 0.5).matrix(),
                      dir.file("in.pgm"));
    const auto ok = run("complete --image " + dir.file("in.pgm")
                        + " --drop-frac 0.3 --mask-seed 2 --lambda 0.05 --relax laplace"
                        + " --gamma 1 --mode laguerre --trunc 8 --iters 20 --seed 1 --out "
                        + dir.file("out.pgm"));
    CHECK(ok.exit_code == 0);

    const auto bad = run("complete --image " + dir.file("in.pgm")
                         + " --drop-frac 1.5 --iters 1 --out " + dir.file("out.pgm"));
    CHECK(bad.exit_code == 2);
}

TEST_CASE("separate requires at least two frames")
{
    TempDir dir;
    fs::create_directories(dir.file("frames"));
    lrr::io::save_pgm(Mat::Constant(4, 4, 0.5), dir.file("frames/f0.pgm"));
    const auto r = run("separate --frames " + dir.file("frames") + " --out-bg " + dir.file("bg")
                       + " --out-fg " + dir.file("fg"));
    CHECK(r.exit_code == 2);
}

TEST_CASE("separate leaves a static scene's foreground at midgray")
{
    TempDir dir;
    fs::create_directories(dir.file("frames"));
    const Mat frame = (testutil::random_mat(6, 6, 11).array().tanh() * 0.4 + 0.5).matrix();
    for (int t = 0; t < 4; ++t)
        lrr::io::save_pgm(frame, dir.file("frames/f" + std::to_string(t) + ".pgm"));

    const auto r = run("separate --frames " + dir.file("frames") + " --lambda 0.02 --iters 120"
                       + " --out-bg " + dir.file("bg") + " --out-fg " + dir.file("fg"));
    CHECK(r.exit_code == 0);
    for (int t = 0; t < 4; ++t) {
        const Mat fg = lrr::io::load_pgm(dir.file("fg/f" + std::to_string(t) + ".pgm"));
        CHECK((fg.array() - 0.5).abs().mean() <= 0.05);
    }
}

TEST_CASE("convergence sweep over k1 writes a well-formed csv")
{
    TempDir dir;
    lrr::io::save_matrix_csv(testutil::with_spectrum(8, 8, testutil::linspace(1.0, 3.0, 6), 3),
                             dir.file("m.csv"));
    const auto r = run("convergence --sweep k1 --values 1,2,5 --input " + dir.file("m.csv")
                       + " --trials 3 --samples 100 --seed 2 --out " + dir.file("sweep.csv"));
    CHECK(r.exit_code == 0);
    std::ifstream in(dir.file("sweep.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "swept_value,trial,estimate,oracle,rel_error,elapsed");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty())
            ++rows;
    CHECK(rows == 9);
}

TEST_CASE("estimate with the laplace relaxation against the oracle")
{
    TempDir dir;
    Mat d = Mat::Zero(3, 3);
    d(0, 0) = 0.4;
    d(1, 1) = 1.0;
    d(2, 2) = 1.6;
    lrr::io::save_matrix_csv(d, dir.file("d.csv"));
    for (const std::string mode : {"laguerre", "taylor"}) {
        const auto r = run("estimate --input " + dir.file("d.csv")
                           + " --relax laplace --gamma 1 --mode " + mode
                           + " --trunc 10 --samples 4000 --k1 30 --k2 30 --seed 4 --oracle");
        CHECK(r.exit_code == 0);
        CHECK(parse_field(r.output, "rel_error") <= 0.15);
    }
}

TEST_CASE("estimator contract violations exit 3")
{
    TempDir dir;
    lrr::io::save_matrix_csv(Mat::Identity(3, 3), dir.file("m.csv"));
    const auto r = run("estimate --input " + dir.file("m.csv") + " --stat rank --samples 0");
    CHECK(r.exit_code == 3);
}

TEST_CASE("divergent solve exits 4 and flushes the partial report")
{
    TempDir dir;
    lrr::io::save_pgm(Mat::Constant(6, 6, 0.5), dir.file("in.pgm"));
    const auto r = run("complete --image " + dir.file("in.pgm")
                       + " --lambda 1 --iters 10 --step 1e200 --out " + dir.file("out.pgm")
                       + " --report " + dir.file("rep.csv"));
    CHECK(r.exit_code == 4);
    CHECK(!lrr::io::load_solve_report_csv(dir.file("rep.csv")).empty());
}

TEST_CASE("complete recovers a synthetic rank-5 image above 30 dB")
{
    TempDir dir;
    Mat img = Mat::Zero(48, 48);
    for (int r = 0; r < 5; ++r)
        img += testutil::random_mat(48, 1, 900, static_cast<std::uint64_t>(r))
               * testutil::random_mat(48, 1, 901, static_cast<std::uint64_t>(r)).transpose();
    const double lo = img.minCoeff(), hi = img.maxCoeff();
    img = ((img.array() - lo) / (hi - lo) * 0.9 + 0.05).matrix();
    lrr::io::save_pgm(img, dir.file("truth.pgm"));

    const auto r = run("complete --image " + dir.file("truth.pgm")
                       + " --drop-frac 0.5 --mask-seed 7 --lambda 0.01 --iters 500 --k1 20"
                       + " --samples 32 --seed 3 --out " + dir.file("rec.pgm") + " --truth "
                       + dir.file("truth.pgm"));
    CHECK(r.exit_code == 0);
    CHECK(parse_field(r.output, "psnr_db") >= 30.0);
}

TEST_CASE("separate localizes a moving square in the foreground")
{
    TempDir dir;
    fs::create_directories(dir.file("frames"));
    const int frames = 6;
    for (int t = 0; t < frames; ++t) {
        Mat f(8, 8);
        for (Eigen::Index i = 0; i < 8; ++i)
            for (Eigen::Index j = 0; j < 8; ++j)
                f(i, j) = 0.2 + 0.5 * (static_cast<double>(i) / 8.0) * (static_cast<double>(j) / 8.0);
        for (Eigen::Index i = t; i < t + 3; ++i)
            for (Eigen::Index j = t; j < t + 3; ++j)
                f(i, j) = 0.95;
        char name[16];
        std::snprintf(name, sizeof name, "f%02d.pgm", t);
        lrr::io::save_pgm(f, dir.file(std::string("frames/") + name));
    }

    const auto r = run("separate --frames " + dir.file("frames")
                       + " --lambda 6 --iters 400 --k1 20 --samples 16 --seed 3 --step 0.02"
                       + " --out-bg " + dir.file("bg") + " --out-fg " + dir.file("fg"));
    CHECK(r.exit_code == 0);

    int in_support = 0, total = 0;
    for (int t = 0; t < frames; ++t) {
        char name[16];
        std::snprintf(name, sizeof name, "f%02d.pgm", t);
        const Mat fg = lrr::io::load_pgm(dir.file(std::string("fg/") + name));
        std::vector<std::pair<double, std::pair<int, int>>> mag;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                mag.push_back({std::abs(fg(i, j) - 0.5), {i, j}});
        std::sort(mag.begin(), mag.end(), [](auto& a, auto& b) { return a.first > b.first; });
        for (int k = 0; k < 6; ++k) { // top decile of 64 pixels
            const auto [i, j] = mag[static_cast<std::size_t>(k)].second;
            in_support += (i >= t && i < t + 3 && j >= t && j < t + 3);
            ++total;
        }
    }
    CHECK(static_cast<double>(in_support) / total >= 0.7);
}

TEST_CASE("convergence k1 sweep has non-increasing mean rel-error")
{
    TempDir dir;
    lrr::io::save_matrix_csv(testutil::with_spectrum(30, 30, testutil::linspace(1.0, 10.0, 30), 701),
                             dir.file("m30.csv"));
    const auto r = run("convergence --sweep k1 --values 1,2,5,10,30 --input " + dir.file("m30.csv")
                       + " --trials 8 --samples 200 --seed 6 --out " + dir.file("sweep.csv"));
    CHECK(r.exit_code == 0);

    std::ifstream in(dir.file("sweep.csv"));
    std::string line;
    std::getline(in, line); // header
    std::map<double, std::pair<double, int>> acc;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ','))
            cells.push_back(std::stod(cell));
        acc[cells[0]].first += cells[4];
        acc[cells[0]].second += 1;
    }
    double prev = 1e300;
    for (const auto& [k1, sum_count] : acc) {
        const double mean = sum_count.first / sum_count.second;
        CHECK(mean <= prev + 1e-12);
        prev = mean;
    }
}

TEST_CASE("convergence lambda sweep writes the loss decomposition")
{
    TempDir dir;
    const auto r = run("convergence --sweep lambda --values 0.1,1 --iters 60 --samples 50"
                       " --seed 2 --out " + dir.file("lam.csv"));
    CHECK(r.exit_code == 0);
    std::ifstream in(dir.file("lam.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "lambda,final_l1,final_l2,final_total");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty())
            ++rows;
    CHECK(rows == 2);
}

TEST_CASE("convergence rejects an unknown axis and an empty value list")
{
    TempDir dir;
    lrr::io::save_matrix_csv(Mat::Identity(3, 3), dir.file("m.csv"));
    const auto bad_axis = run("convergence --sweep sigma --values 1 --input " + dir.file("m.csv")
                              + " --out " + dir.file("s.csv"));
    CHECK(bad_axis.exit_code == 2);
    const auto no_values = run("convergence --sweep k1 --values '' --input " + dir.file("m.csv")
                               + " --out " + dir.file("s.csv"));
    CHECK(no_values.exit_code == 2);
}
