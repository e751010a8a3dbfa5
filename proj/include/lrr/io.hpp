#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrr/dense.hpp"
#include "lrr/solvers.hpp"

namespace lrr::io {

/// File could not be opened or its contents do not parse.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// CSV of doubles, one row per line, comma separated. An optional first line
/// "# rows cols" is honored and checked; ragged rows are rejected.
Mat load_matrix_csv(const std::string& path);
void save_matrix_csv(const Mat& m, const std::string& path);

/// 8-bit grayscale PGM (P2 ASCII or P5 binary), maxval 255 required.
/// Pixels map to [0,1] on load; save clamps to [0,1] and quantizes, so
/// load-save-load is the identity on the float representation.
Mat load_pgm(const std::string& path);
void save_pgm(const Mat& m, const std::string& path);

/// CSV mask of {0,1}, checked binary.
Mat load_mask_csv(const std::string& path);

/// Bernoulli mask dropping each entry independently with probability
/// drop_frac (pinned generator: std::mt19937_64 raw draws mapped to [0,1)).
Mat make_drop_mask(Eigen::Index rows, Eigen::Index cols, double drop_frac, std::uint64_t seed);

/// "iteration,data_loss,reg_loss,total" rows, one per recorded iterate.
void save_solve_report_csv(const SolveReport& report, const std::string& path);
std::vector<SolveReport::Iterate> load_solve_report_csv(const std::string& path);

/// 10 log10(1 / MSE) on the [0,1] scale, MSE over all pixels.
double psnr(const Mat& truth, const Mat& recovered);

} // namespace lrr::io
