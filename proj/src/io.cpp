#include "lrr/io.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace lrr::io {

namespace {

std::vector<std::vector<double>> parse_csv_rows(std::istream& in, const std::string& path,
                                                Eigen::Index& header_rows, Eigen::Index& header_cols)
{
    header_rows = header_cols = -1;
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (first && line[0] == '#') {
            std::istringstream hdr(line.substr(1));
            if (!(hdr >> header_rows >> header_cols) || header_rows <= 0 || header_cols <= 0)
                throw IoError(path + ": malformed header '" + line + "'");
            first = false;
            continue;
        }
        first = false;
        std::vector<double> row;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
                    ++pos;
                if (pos != cell.size())
                    throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw IoError(path + ": bad number '" + cell + "'");
            }
        }
        if (row.empty())
            throw IoError(path + ": empty row");
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

Mat load_matrix_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);

    Eigen::Index hr, hc;
    auto rows = parse_csv_rows(in, path, hr, hc);
    if (rows.empty())
        throw IoError(path + ": no data rows");
    const std::size_t cols = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != cols)
            throw IoError(path + ": ragged row (expected " + std::to_string(cols) + " columns, got "
                          + std::to_string(r.size()) + ")");
    if (hr >= 0 && (hr != static_cast<Eigen::Index>(rows.size()) || hc != static_cast<Eigen::Index>(cols)))
        throw IoError(path + ": header dims disagree with data");

    Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void save_matrix_csv(const Mat& m, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << "# " << m.rows() << ' ' << m.cols() << '\n';
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j)
                out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

namespace {

int next_pgm_token(std::istream& in, const std::string& path)
{
    // Skips whitespace and '#' comment lines, PGM style.
    for (;;) {
        int c = in.peek();
        if (c == EOF)
            throw IoError(path + ": truncated PGM header");
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int value;
    if (!(in >> value))
        throw IoError(path + ": malformed PGM header");
    return value;
}

} // namespace

Mat load_pgm(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);

    std::string magic;
    in >> magic;
    if (magic != "P2" && magic != "P5")
        throw IoError(path + ": not a P2/P5 PGM (magic '" + magic + "')");

    const int width = next_pgm_token(in, path);
    const int height = next_pgm_token(in, path);
    const int maxval = next_pgm_token(in, path);
    if (width <= 0 || height <= 0)
        throw IoError(path + ": non-positive PGM dimensions");
    if (maxval != 255)
        throw IoError(path + ": PGM maxval must be 255, got " + std::to_string(maxval));

    Mat m(height, width);
    if (magic == "P2") {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                int v;
                if (!(in >> v) || v < 0 || v > 255)
                    throw IoError(path + ": bad P2 pixel");
                m(i, j) = v / 255.0;
            }
    } else {
        in.get(); // single whitespace after maxval
        std::vector<unsigned char> buf(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in.gcount()) != buf.size())
            throw IoError(path + ": truncated P5 pixel data");
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                m(i, j) = buf[static_cast<std::size_t>(i * width + j)] / 255.0;
    }
    return m;
}

void save_pgm(const Mat& m, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double clamped = std::min(1.0, std::max(0.0, m(i, j)));
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0))));
        }
}

Mat load_mask_csv(const std::string& path)
{
    Mat m = load_matrix_csv(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0 && m(i, j) != 1.0)
                throw IoError(path + ": mask entries must be 0 or 1");
    return m;
}

Mat make_drop_mask(Eigen::Index rows, Eigen::Index cols, double drop_frac, std::uint64_t seed)
{
    if (drop_frac < 0.0 || drop_frac > 1.0)
        throw ContractError("make_drop_mask: drop_frac must be in [0, 1]");
    std::mt19937_64 gen(seed);
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            m(i, j) = u < drop_frac ? 0.0 : 1.0;
        }
    return m;
}

void save_solve_report_csv(const SolveReport& report, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << "iteration,data_loss,reg_loss,total\n";
    out.precision(17);
    for (const auto& it : report.iterates)
        out << it.iteration << ',' << it.data_loss << ',' << it.reg_loss << ',' << it.total << '\n';
}

std::vector<SolveReport::Iterate> load_solve_report_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);
    std::vector<SolveReport::Iterate> rows;
    std::string line;
    if (!std::getline(in, line) || line != "iteration,data_loss,reg_loss,total")
        throw IoError(path + ": missing report header");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ss(line);
        SolveReport::Iterate rec{};
        char comma;
        if (!(ss >> rec.iteration >> comma >> rec.data_loss >> comma >> rec.reg_loss >> comma
              >> rec.total))
            throw IoError(path + ": malformed report row '" + line + "'");
        rows.push_back(rec);
    }
    return rows;
}

double psnr(const Mat& truth, const Mat& recovered)
{
    if (truth.rows() != recovered.rows() || truth.cols() != recovered.cols())
        throw ShapeError("psnr: shape mismatch");
    const double mse = (truth - recovered).squaredNorm() / static_cast<double>(truth.size());
    return 10.0 * std::log10(1.0 / mse);
}

} // namespace lrr::io
