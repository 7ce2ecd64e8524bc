#ifndef VISCLUST_DATASET_HPP
#define VISCLUST_DATASET_HPP

// Dataset container, coordinate scaling, synthetic data generators and
// delimited-text I/O.

#include <Eigen/Dense>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "visclust/core.hpp"

namespace visclust {

struct Dataset {
    Eigen::MatrixXd points;   // one row per observation
    std::vector<int> labels;  // empty, or one label per row

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
    bool has_labels() const { return !labels.empty(); }
};

// Maps every column onto [-1, 1]; a constant column maps to 0.
inline Eigen::MatrixXd scale_minmax(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double lo = x.col(j).minCoeff();
        const double hi = x.col(j).maxCoeff();
        if (hi > lo)
            out.col(j) = (2.0 / (hi - lo)) * (x.col(j).array() - lo) - 1.0;
        else
            out.col(j).setZero();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

// Isotropic Gaussian blobs. The first center sits at the origin; every further
// center is placed exactly 2.5 away from a uniformly chosen existing center
// and at least 2.5 away from all the others, by rejection sampling. Sizes are
// balanced, with the remainder of m / n_c going to the first clusters.
inline Dataset gen_blobs(int m, int d, int n_c, double stddev, Rng& rng) {
    if (m < 1 || d < 1) throw InvalidInputError("gen_blobs: need m >= 1, d >= 1");
    if (n_c < 1 || n_c > m) throw InvalidInputError("gen_blobs: need 1 <= n_c <= m");
    if (stddev < 0) throw InvalidInputError("gen_blobs: stddev must be nonnegative");

    constexpr double kSpacing = 2.5;
    constexpr int kMaxAttempts = 100000;

    std::vector<Eigen::VectorXd> centers;
    centers.push_back(Eigen::VectorXd::Zero(d));
    while (static_cast<int>(centers.size()) < n_c) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            const auto& base =
                centers[static_cast<std::size_t>(rng.below(centers.size()))];
            Eigen::VectorXd dir(d);
            do {
                for (int j = 0; j < d; ++j) dir(j) = rng.normal();
            } while (dir.norm() == 0.0);
            dir /= dir.norm();
            Eigen::VectorXd cand = base + kSpacing * dir;
            bool ok = true;
            for (const auto& c : centers)
                if ((cand - c).norm() < kSpacing - 1e-9) { ok = false; break; }
            if (ok) {
                centers.push_back(std::move(cand));
                placed = true;
            }
        }
        if (!placed)
            throw GenerationError("gen_blobs: could not place center " +
                                  std::to_string(centers.size()) + " after " +
                                  std::to_string(kMaxAttempts) + " attempts");
    }

    Dataset out;
    out.points.resize(m, d);
    out.labels.resize(static_cast<std::size_t>(m));
    const int base_size = m / n_c;
    const int remainder = m % n_c;
    int row = 0;
    for (int c = 0; c < n_c; ++c) {
        const int size = base_size + (c < remainder ? 1 : 0);
        for (int i = 0; i < size; ++i, ++row) {
            for (int j = 0; j < d; ++j)
                out.points(row, j) = centers[static_cast<std::size_t>(c)](j) +
                                     stddev * rng.normal();
            out.labels[static_cast<std::size_t>(row)] = c + 1;
        }
    }
    return out;
}

// Appends new_d - d coordinates drawn uniformly from the global [min, max]
// range of the existing entries. Labels are carried through.
inline Dataset pad_dimensions(const Dataset& x, int new_d, Rng& rng) {
    if (x.size() < 1) throw InsufficientDataError("pad_dimensions: empty dataset");
    if (new_d < x.dim())
        throw InvalidInputError("pad_dimensions: new_d must be >= current dim");
    const double lo = x.points.minCoeff();
    const double hi = x.points.maxCoeff();
    Dataset out;
    out.labels = x.labels;
    out.points.resize(x.size(), new_d);
    out.points.leftCols(x.dim()) = x.points;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        for (Eigen::Index j = x.dim(); j < new_d; ++j)
            out.points(i, j) = rng.uniform(lo, hi);
    return out;
}

// Two concentric circles of radius 1.0 (label 1) and 0.5 (label 2) with
// additive Gaussian coordinate noise. The outer circle gets ceil(m/2) points.
inline Dataset gen_circles(int m, double noise, Rng& rng) {
    if (m < 1) throw InvalidInputError("gen_circles: need m >= 1");
    if (noise < 0) throw InvalidInputError("gen_circles: noise must be nonnegative");
    const int n_out = (m + 1) / 2;
    const int n_in = m - n_out;
    Dataset out;
    out.points.resize(m, 2);
    out.labels.resize(static_cast<std::size_t>(m));
    constexpr double kTau = 6.28318530717958647692;
    for (int i = 0; i < n_out; ++i) {
        const double t = kTau * i / n_out;
        out.points(i, 0) = std::cos(t);
        out.points(i, 1) = std::sin(t);
        out.labels[static_cast<std::size_t>(i)] = 1;
    }
    for (int i = 0; i < n_in; ++i) {
        const double t = kTau * i / n_in;
        out.points(n_out + i, 0) = 0.5 * std::cos(t);
        out.points(n_out + i, 1) = 0.5 * std::sin(t);
        out.labels[static_cast<std::size_t>(n_out + i)] = 2;
    }
    if (noise > 0)
        for (Eigen::Index i = 0; i < out.points.rows(); ++i)
            for (Eigen::Index j = 0; j < 2; ++j)
                out.points(i, j) += noise * rng.normal();
    return out;
}

// Two interleaved half-moons: the upper moon is the unit upper half-circle
// (label 1), the lower moon is its reflection shifted by (1, 0.5) (label 2),
// with additive Gaussian coordinate noise.
inline Dataset gen_moons(int m, double noise, Rng& rng) {
    if (m < 1) throw InvalidInputError("gen_moons: need m >= 1");
    if (noise < 0) throw InvalidInputError("gen_moons: noise must be nonnegative");
    const int n_up = (m + 1) / 2;
    const int n_lo = m - n_up;
    Dataset out;
    out.points.resize(m, 2);
    out.labels.resize(static_cast<std::size_t>(m));
    constexpr double kPi = 3.14159265358979323846;
    for (int i = 0; i < n_up; ++i) {
        const double t = n_up > 1 ? kPi * i / (n_up - 1) : 0.0;
        out.points(i, 0) = std::cos(t);
        out.points(i, 1) = std::sin(t);
        out.labels[static_cast<std::size_t>(i)] = 1;
    }
    for (int i = 0; i < n_lo; ++i) {
        const double t = n_lo > 1 ? kPi * i / (n_lo - 1) : 0.0;
        out.points(n_up + i, 0) = 1.0 - std::cos(t);
        out.points(n_up + i, 1) = 0.5 - std::sin(t);
        out.labels[static_cast<std::size_t>(n_up + i)] = 2;
    }
    if (noise > 0)
        for (Eigen::Index i = 0; i < out.points.rows(); ++i)
            for (Eigen::Index j = 0; j < 2; ++j)
                out.points(i, j) += noise * rng.normal();
    return out;
}

// A single isotropic Gaussian centered at the origin; one class, labels all 1.
inline Dataset gen_single_gaussian(int m, int d, double stddev, Rng& rng) {
    if (m < 1 || d < 1)
        throw InvalidInputError("gen_single_gaussian: need m >= 1, d >= 1");
    if (stddev < 0)
        throw InvalidInputError("gen_single_gaussian: stddev must be nonnegative");
    Dataset out;
    out.points.resize(m, d);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j) out.points(i, j) = stddev * rng.normal();
    out.labels.assign(static_cast<std::size_t>(m), 1);
    return out;
}

// ---------------------------------------------------------------------------
// Delimited-text I/O
// ---------------------------------------------------------------------------

struct LoadOptions {
    std::optional<bool> header;              // unset: auto-detect
    char delimiter = '\0';                   // '\0': auto-detect comma vs tab
    std::optional<int> label_index;          // 0-based column holding labels
    std::optional<std::string> label_name;   // header name of the label column
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

inline bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
    if (b == e) return false;
    const auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

}  // namespace detail

// Reads a comma- or tab-separated table of numbers, optionally peeling one
// column off as integer labels. Delimiter and header row are auto-detected
// unless pinned in the options.
inline Dataset load_delimited(const std::string& path,
                              const LoadOptions& opt = {}) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("load_delimited: cannot open '" + path + "'");

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
            lines.push_back(line);
    }
    if (lines.empty())
        throw InsufficientDataError("load_delimited: '" + path + "' has no data");

    const char delim = opt.delimiter != '\0'
                           ? opt.delimiter
                           : (lines[0].find('\t') != std::string::npos ? '\t' : ',');

    auto first = detail::split_line(lines[0], delim);
    bool has_header;
    if (opt.header.has_value()) {
        has_header = *opt.header;
    } else {
        has_header = false;
        for (const auto& cell : first) {
            double v;
            if (!detail::parse_double(cell, v)) { has_header = true; break; }
        }
    }

    int label_col = -1;
    if (opt.label_name.has_value()) {
        if (!has_header)
            throw InvalidInputError(
                "load_delimited: label column named '" + *opt.label_name +
                "' requires a header row");
        for (std::size_t j = 0; j < first.size(); ++j)
            if (first[j] == *opt.label_name) label_col = static_cast<int>(j);
        if (label_col < 0)
            throw InvalidInputError("load_delimited: no column named '" +
                                    *opt.label_name + "'");
    } else if (opt.label_index.has_value()) {
        label_col = *opt.label_index;
        if (label_col < 0 || label_col >= static_cast<int>(first.size()))
            throw InvalidInputError("load_delimited: label column index " +
                                    std::to_string(label_col) + " out of range");
    }

    const std::size_t ncols = first.size();
    const std::size_t start = has_header ? 1 : 0;
    const std::size_t nrows = lines.size() - start;
    if (nrows == 0)
        throw InsufficientDataError("load_delimited: '" + path +
                                    "' has a header but no data rows");
    const int d = static_cast<int>(ncols) - (label_col >= 0 ? 1 : 0);
    if (d < 1)
        throw InvalidInputError("load_delimited: no feature columns left");

    Dataset out;
    out.points.resize(static_cast<Eigen::Index>(nrows), d);
    if (label_col >= 0) out.labels.resize(nrows);

    for (std::size_t r = 0; r < nrows; ++r) {
        const auto cells = detail::split_line(lines[start + r], delim);
        if (cells.size() != ncols)
            throw InvalidInputError(
                "load_delimited: row " + std::to_string(start + r + 1) + " has " +
                std::to_string(cells.size()) + " columns, expected " +
                std::to_string(ncols));
        int jj = 0;
        for (std::size_t j = 0; j < ncols; ++j) {
            double v;
            if (!detail::parse_double(cells[j], v))
                throw InvalidInputError("load_delimited: row " +
                                        std::to_string(start + r + 1) + ", column " +
                                        std::to_string(j + 1) + ": cannot parse '" +
                                        cells[j] + "'");
            if (static_cast<int>(j) == label_col) {
                const int lab = static_cast<int>(v);
                if (static_cast<double>(lab) != v)
                    throw InvalidInputError("load_delimited: row " +
                                            std::to_string(start + r + 1) +
                                            ": label '" + cells[j] +
                                            "' is not an integer");
                out.labels[r] = lab;
            } else {
                out.points(static_cast<Eigen::Index>(r), jj++) = v;
            }
        }
    }
    return out;
}

// Writes features (and the label column when present) as CSV with 17
// significant digits, which round-trips doubles exactly.
inline void save_dataset(const std::string& path, const Dataset& x,
                         bool header = true) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("save_dataset: cannot open '" + path + "'");
    char buf[64];
    if (header) {
        for (Eigen::Index j = 0; j < x.dim(); ++j) {
            if (j) out << ',';
            out << 'f' << j;
        }
        if (x.has_labels()) out << ",label";
        out << '\n';
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        for (Eigen::Index j = 0; j < x.dim(); ++j) {
            if (j) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", x.points(i, j));
            out << buf;
        }
        if (x.has_labels()) out << ',' << x.labels[static_cast<std::size_t>(i)];
        out << '\n';
    }
    if (!out) throw InvalidInputError("save_dataset: write to '" + path + "' failed");
}

inline void save_labels(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("save_labels: cannot open '" + path + "'");
    for (int v : labels) out << v << '\n';
    if (!out) throw InvalidInputError("save_labels: write to '" + path + "' failed");
}

// One integer label per line; blank lines ignored.
inline std::vector<int> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("load_labels: cannot open '" + path + "'");
    std::vector<int> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        double v;
        if (!detail::parse_double(line, v) ||
            static_cast<double>(static_cast<int>(v)) != v)
            throw InvalidInputError("load_labels: line " + std::to_string(lineno) +
                                    ": cannot parse '" + line + "' as an integer");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty())
        throw InsufficientDataError("load_labels: '" + path + "' has no labels");
    return out;
}

}  // namespace visclust

#endif  // VISCLUST_DATASET_HPP
