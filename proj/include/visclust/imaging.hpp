#ifndef VISCLUST_IMAGING_HPP
#define VISCLUST_IMAGING_HPP

// Image pipeline: quantize projected points to an integer grid, rasterize to
// a binary image, Gaussian-filter, threshold at the image mean, and label
// connected components (8-neighborhood in 2-D, 26 in 3-D). Two equivalent
// routes exist: a dense separable convolution and, for sparse 3-D images, a
// fused per-point accumulation that never materializes the full grid.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "visclust/core.hpp"

namespace visclust {

// ---------------------------------------------------------------------------
// Image
// ---------------------------------------------------------------------------

// Dense k-dimensional grid of doubles in raster order (last axis fastest).
class Image {
public:
    Image() = default;
    explicit Image(std::vector<int> shape) : shape_(std::move(shape)) {
        if (shape_.empty()) throw DimensionError("Image: empty shape");
        std::int64_t n = 1;
        for (int e : shape_) {
            if (e < 1) throw DimensionError("Image: extents must be positive");
            if (e > (1 << 20)) throw InvalidInputError("Image: extent too large");
            n *= e;
        }
        if (n > (std::int64_t{1} << 31))
            throw InvalidInputError("Image: too many voxels for a dense grid");
        data_.assign(static_cast<std::size_t>(n), 0.0);
    }

    int ndim() const { return static_cast<int>(shape_.size()); }
    const std::vector<int>& shape() const { return shape_; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

    double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    std::int64_t offset(const int* coords) const {
        std::int64_t o = 0;
        for (std::size_t a = 0; a < shape_.size(); ++a)
            o = o * shape_[a] + coords[a];
        return o;
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Quantization and rasterization
// ---------------------------------------------------------------------------

struct QuantizedPoints {
    Eigen::MatrixXi z;          // m x k nonnegative pixel coordinates
    Eigen::RowVectorXd origin;  // per-dimension minima of the projected data
    std::vector<int> shape;     // per-dimension extent (max coordinate + 1)

    int count() const { return static_cast<int>(z.rows()); }
    int ndim() const { return static_cast<int>(z.cols()); }
};

// z_i = floor(100 * (x_i - min_j x_j)) component-wise; two points closer
// than 0.01 in every coordinate land on equal or adjacent pixels.
inline QuantizedPoints quantize(const Eigen::MatrixXd& projected) {
    const int m = static_cast<int>(projected.rows());
    const int k = static_cast<int>(projected.cols());
    if (m < 1) throw InsufficientDataError("quantize: no points");
    if (k != 2 && k != 3)
        throw DimensionError("quantize: projected dimension must be 2 or 3");
    if (!projected.allFinite())
        throw InvalidInputError("quantize: non-finite coordinates");

    QuantizedPoints q;
    q.origin = projected.colwise().minCoeff();
    q.z.resize(m, k);
    q.shape.assign(static_cast<std::size_t>(k), 0);
    for (int r = 0; r < k; ++r) {
        const double lo = q.origin(r);
        const double span = projected.col(r).maxCoeff() - lo;
        if (100.0 * span >= static_cast<double>(1 << 20))
            throw InvalidInputError("quantize: projected data range too large");
        int hi = 0;
        for (int i = 0; i < m; ++i) {
            const int v = static_cast<int>(std::floor(100.0 * (projected(i, r) - lo)));
            q.z(i, r) = v;
            if (v > hi) hi = v;
        }
        q.shape[static_cast<std::size_t>(r)] = hi + 1;
    }
    return q;
}

struct BinaryImage {
    Image grid;  // {0,1} after rasterize; nonnegative reals after filtering
    std::unordered_map<std::int64_t, std::vector<int>> point_index;
};

inline BinaryImage rasterize(const QuantizedPoints& q) {
    BinaryImage b;
    b.grid = Image(q.shape);
    for (int i = 0; i < q.count(); ++i) {
        std::int64_t off = 0;
        for (int r = 0; r < q.ndim(); ++r)
            off = off * q.shape[static_cast<std::size_t>(r)] + q.z(i, r);
        b.grid[off] = 1.0;
        b.point_index[off].push_back(i);
    }
    return b;
}

// ---------------------------------------------------------------------------
// Kernel width estimation
// ---------------------------------------------------------------------------

// Median of the 1000 shortest pairwise distances (all pairs if fewer), taken
// on a <=500-point subsample, converted to pixel units (x100) and weighted by
// the scale factor s. Coincident data fall back to 1 pixel.
inline double estimate_sigma(const Eigen::MatrixXd& projected, double s, Rng& rng) {
    const int m = static_cast<int>(projected.rows());
    if (m < 2) throw InsufficientDataError("estimate_sigma: need at least 2 points");
    if (s <= 0) throw InvalidInputError("estimate_sigma: scale must be positive");

    Eigen::MatrixXd sub;
    const Eigen::MatrixXd* pts = &projected;
    if (m > 500) {
        const std::vector<int> idx = sample_indices(m, 500, rng);
        sub.resize(500, projected.cols());
        for (int i = 0; i < 500; ++i)
            sub.row(i) = projected.row(idx[static_cast<std::size_t>(i)]);
        pts = &sub;
    }
    const int ms = static_cast<int>(pts->rows());
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(ms) * (ms - 1) / 2);
    for (int i = 0; i < ms; ++i)
        for (int j = i + 1; j < ms; ++j)
            d2.push_back((pts->row(i) - pts->row(j)).squaredNorm());

    const std::size_t take = std::min<std::size_t>(1000, d2.size());
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(take) - 1,
                     d2.end());
    std::sort(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(take));
    // Median of distances, not of squared distances: take square roots first.
    double med;
    if (take % 2 == 1) {
        med = std::sqrt(d2[take / 2]);
    } else {
        med = 0.5 * (std::sqrt(d2[take / 2 - 1]) + std::sqrt(d2[take / 2]));
    }
    // The filter's spatial scale grows with the SQUARE of the estimated
    // deviation (the kernel definition puts sigma^2 on the length axis), so
    // the pixel-space standard deviation is 100 * median^2 weighted by s,
    // floored at one pixel -- the grid cannot resolve anything finer.
    return std::max(1.0, med * med * 100.0 * s);
}

inline int kernel_radius(double sigma) {
    if (sigma <= 0) throw InvalidInputError("kernel_radius: sigma must be positive");
    return static_cast<int>(std::ceil(3.0 * sigma));
}

// 1-D slice of the isotropic kernel exp(-|x|^2 / (2 sigma^2)), length 2r+1,
// normalized to sum 1 so the separable k-D kernel also sums to 1.
inline std::vector<double> gaussian_kernel(double sigma) {
    const int r = kernel_radius(sigma);
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int t = -r; t <= r; ++t) {
        const double v = std::exp(-(static_cast<double>(t) * t) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(t + r)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

// Outlier cutoff for components: the kernel element count (2r+1)^k.
inline std::int64_t min_component_size(double sigma, int k) {
    if (k < 1) throw DimensionError("min_component_size: dimension must be positive");
    const std::int64_t w = 2 * static_cast<std::int64_t>(kernel_radius(sigma)) + 1;
    std::int64_t out = 1;
    for (int i = 0; i < k; ++i) out *= w;
    return out;
}

// ---------------------------------------------------------------------------
// Dense filtering and thresholding
// ---------------------------------------------------------------------------

// Separable convolution with zero padding. Each 1-D line is clipped to the
// span that can be nonzero (input support dilated by the kernel radius).
inline Image gaussian_filter(const Image& img, double sigma) {
    const std::vector<double> kern = gaussian_kernel(sigma);
    const int r = (static_cast<int>(kern.size()) - 1) / 2;
    const int nd = img.ndim();

    Image cur = img;
    Image next(img.shape());
    std::vector<double> line;
    for (int a = 0; a < nd; ++a) {
        const int n = img.shape()[static_cast<std::size_t>(a)];
        std::int64_t stride = 1;
        for (int b = a + 1; b < nd; ++b) stride *= img.shape()[static_cast<std::size_t>(b)];
        const std::int64_t outer = img.size() / (static_cast<std::int64_t>(n) * stride);
        line.assign(static_cast<std::size_t>(n), 0.0);

        for (std::int64_t o = 0; o < outer; ++o) {
            for (std::int64_t inner = 0; inner < stride; ++inner) {
                const std::int64_t base = o * n * stride + inner;
                int first = -1, last = -1;
                for (int t = 0; t < n; ++t) {
                    const double v = cur[base + t * stride];
                    line[static_cast<std::size_t>(t)] = v;
                    if (v != 0.0) {
                        if (first < 0) first = t;
                        last = t;
                    }
                }
                if (first < 0) {
                    for (int t = 0; t < n; ++t) next[base + t * stride] = 0.0;
                    continue;
                }
                const int lo = std::max(0, first - r);
                const int hi = std::min(n - 1, last + r);
                for (int t = 0; t < lo; ++t) next[base + t * stride] = 0.0;
                for (int t = hi + 1; t < n; ++t) next[base + t * stride] = 0.0;
                for (int t = lo; t <= hi; ++t) {
                    const int ua = std::max(first, t - r);
                    const int ub = std::min(last, t + r);
                    double sum = 0.0;
                    for (int u = ua; u <= ub; ++u)
                        sum += line[static_cast<std::size_t>(u)] *
                               kern[static_cast<std::size_t>(t - u + r)];
                    next[base + t * stride] = sum;
                }
            }
        }
        std::swap(cur.data(), next.data());
    }
    return cur;
}

inline double mean_value(const Image& img) {
    double sum = 0.0;
    for (double v : img.data()) sum += v;
    return sum / static_cast<double>(img.size());
}

// Keep entries strictly above the mean; ties at the mean become background.
inline Image threshold_mean(const Image& img) {
    const double mean = mean_value(img);
    Image out(img.shape());
    for (std::int64_t i = 0; i < img.size(); ++i)
        out[i] = img[i] > mean ? 1.0 : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Connected components over run-length encoded foreground
// ---------------------------------------------------------------------------

struct Run {
    std::int64_t line;  // 2-D: row index; 3-D: slab * n1 + row
    int lo, hi;         // inclusive column interval on the last axis
    int label;          // 1..n_cc after labeling, 0 for discarded components
};

struct LabeledComponents {
    std::vector<int> shape;
    std::vector<Run> runs;            // raster order, sorted by (line, lo)
    int n_cc = 0;                     // surviving component count
    std::vector<std::int64_t> sizes;  // pixel count per label (index label-1)

    // Label of one pixel; 0 for background, discarded, or out-of-range.
    int label_at(const int* coords) const {
        const int nd = static_cast<int>(shape.size());
        for (int a = 0; a < nd; ++a)
            if (coords[a] < 0 || coords[a] >= shape[static_cast<std::size_t>(a)])
                return 0;
        const std::int64_t line =
            nd == 3 ? static_cast<std::int64_t>(coords[0]) * shape[1] + coords[1]
                    : coords[0];
        const int col = coords[nd - 1];
        auto it = std::partition_point(
            runs.begin(), runs.end(), [&](const Run& r) {
                return r.line < line || (r.line == line && r.hi < col);
            });
        if (it != runs.end() && it->line == line && it->lo <= col) return it->label;
        return 0;
    }

    // Dense raster-order export for small grids and test oracles.
    std::vector<int> label_grid() const {
        std::int64_t n = 1;
        for (int e : shape) n *= e;
        const int cols = shape.back();
        std::vector<int> g(static_cast<std::size_t>(n), 0);
        for (const Run& r : runs)
            for (int c = r.lo; c <= r.hi; ++c)
                g[static_cast<std::size_t>(r.line * cols + c)] = r.label;
        return g;
    }
};

namespace detail {

// Two-pass labeling over runs: unions are recorded against overlapping runs
// on already-seen neighbor lines, then components are renumbered in raster
// first-encounter order. Runs must arrive with nondecreasing line index and
// increasing lo within a line.
class RunLabeler {
public:
    explicit RunLabeler(std::vector<int> shape) : shape_(std::move(shape)) {
        const int nd = static_cast<int>(shape_.size());
        if (nd != 2 && nd != 3)
            throw DimensionError("RunLabeler: connectivity defined for 2-D and 3-D");
        n1_ = nd == 3 ? shape_[1] : 0;
        n_lines_ = nd == 3
                       ? static_cast<std::int64_t>(shape_[0]) * shape_[1]
                       : shape_[0];
        line_begin_.assign(static_cast<std::size_t>(n_lines_) + 1, 0);
        cur_line_ = -1;
    }

    void add_run(std::int64_t line, int lo, int hi) {
        if (line > cur_line_) {
            for (std::int64_t l = cur_line_ + 1; l <= line; ++l)
                line_begin_[static_cast<std::size_t>(l)] =
                    static_cast<std::int64_t>(runs_.size());
            cur_line_ = line;
        }
        const int idx = static_cast<int>(runs_.size());
        runs_.push_back(Run{line, lo, hi, 0});
        parent_.push_back(idx);

        const int nd = static_cast<int>(shape_.size());
        std::int64_t nbr[4];
        int n_nbr = 0;
        if (nd == 2) {
            if (line >= 1) nbr[n_nbr++] = line - 1;
        } else {
            const std::int64_t i0 = line / n1_, i1 = line % n1_;
            if (i1 >= 1) nbr[n_nbr++] = line - 1;
            if (i0 >= 1) {
                if (i1 >= 1) nbr[n_nbr++] = line - n1_ - 1;
                nbr[n_nbr++] = line - n1_;
                if (i1 + 1 < n1_) nbr[n_nbr++] = line - n1_ + 1;
            }
        }
        // Diagonal adjacency dilates the interval by one on each side.
        for (int b = 0; b < n_nbr; ++b) {
            const std::int64_t rb = line_begin_[static_cast<std::size_t>(nbr[b])];
            const std::int64_t re = line_begin_[static_cast<std::size_t>(nbr[b]) + 1];
            std::int64_t j = std::partition_point(
                                 runs_.begin() + rb, runs_.begin() + re,
                                 [&](const Run& r) { return r.hi < lo - 1; }) -
                             runs_.begin();
            for (; j < re && runs_[static_cast<std::size_t>(j)].lo <= hi + 1; ++j)
                unite(idx, static_cast<int>(j));
        }
    }

    LabeledComponents finish(std::int64_t min_size) {
        std::vector<std::int64_t> csize(runs_.size(), 0);
        for (std::size_t i = 0; i < runs_.size(); ++i)
            csize[static_cast<std::size_t>(find(static_cast<int>(i)))] +=
                runs_[i].hi - runs_[i].lo + 1;

        LabeledComponents out;
        out.shape = shape_;
        std::vector<int> lab(runs_.size(), 0);
        for (std::size_t i = 0; i < runs_.size(); ++i) {
            const int root = find(static_cast<int>(i));
            if (csize[static_cast<std::size_t>(root)] > min_size) {
                if (lab[static_cast<std::size_t>(root)] == 0) {
                    lab[static_cast<std::size_t>(root)] = ++out.n_cc;
                    out.sizes.push_back(csize[static_cast<std::size_t>(root)]);
                }
                runs_[i].label = lab[static_cast<std::size_t>(root)];
            }
        }
        out.runs = std::move(runs_);
        return out;
    }

private:
    int find(int a) {
        while (parent_[static_cast<std::size_t>(a)] != a) {
            parent_[static_cast<std::size_t>(a)] =
                parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(a)])];
            a = parent_[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }

    std::vector<int> shape_;
    std::int64_t n1_ = 0, n_lines_ = 0, cur_line_ = -1;
    std::vector<std::int64_t> line_begin_;
    std::vector<Run> runs_;
    std::vector<int> parent_;
};

}  // namespace detail

// Components of a binary image; those with pixel count <= min_size are
// relabeled to background, survivors renumbered 1..n_cc in encounter order.
inline LabeledComponents label_components(const Image& img, std::int64_t min_size) {
    detail::RunLabeler labeler(img.shape());
    const int nd = img.ndim();
    const int cols = img.shape()[static_cast<std::size_t>(nd - 1)];
    const std::int64_t n_lines = img.size() / cols;
    for (std::int64_t l = 0; l < n_lines; ++l) {
        const std::int64_t base = l * cols;
        int c = 0;
        while (c < cols) {
            if (img[base + c] > 0.0) {
                const int lo = c;
                while (c < cols && img[base + c] > 0.0) ++c;
                labeler.add_run(l, lo, c - 1);
            } else {
                ++c;
            }
        }
    }
    return labeler.finish(min_size);
}

// Per-point labels from pixel membership; 0 marks points whose pixel was
// smoothed away or belonged to a discarded component.
inline std::vector<int> assign_points(const LabeledComponents& comp,
                                      const QuantizedPoints& q) {
    if (static_cast<std::size_t>(q.ndim()) != comp.shape.size())
        throw DimensionError("assign_points: dimension mismatch");
    std::vector<int> labels(static_cast<std::size_t>(q.count()), 0);
    int coords[3] = {0, 0, 0};
    for (int i = 0; i < q.count(); ++i) {
        for (int r = 0; r < q.ndim(); ++r) coords[r] = q.z(i, r);
        labels[static_cast<std::size_t>(i)] = comp.label_at(coords);
    }
    return labels;
}

inline std::vector<int> assign_points(const LabeledComponents& comp,
                                      const BinaryImage& img) {
    std::size_t m = 0;
    for (const auto& [off, pts] : img.point_index) m += pts.size();
    std::vector<int> labels(m, 0);
    const int nd = static_cast<int>(comp.shape.size());
    for (const auto& [off, pts] : img.point_index) {
        int coords[3] = {0, 0, 0};
        std::int64_t rem = off;
        for (int a = nd - 1; a >= 0; --a) {
            coords[a] = static_cast<int>(rem % comp.shape[static_cast<std::size_t>(a)]);
            rem /= comp.shape[static_cast<std::size_t>(a)];
        }
        const int lab = comp.label_at(coords);
        for (int p : pts) {
            if (p < 0 || static_cast<std::size_t>(p) >= m)
                throw InvalidInputError("assign_points: point index out of range");
            labels[static_cast<std::size_t>(p)] = lab;
        }
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Fused sparse route (3-D)
// ---------------------------------------------------------------------------

namespace detail {

// Filter + threshold + label without materializing the voxel grid: the
// filtered image is the sum of translated kernels at the distinct occupied
// pixels, so only the union of kernel boxes can exceed the mean. The mean is
// the total in-bounds kernel mass (clipped 1-D prefix sums, exact for zero
// padding) divided by the voxel count. Runs above the mean are emitted per
// line from a reusable slab buffer and fed to the same run labeler.
inline LabeledComponents filter_threshold_label_sparse(const QuantizedPoints& q,
                                                       double sigma,
                                                       std::int64_t min_size) {
    if (q.ndim() != 3)
        throw DimensionError("sparse imaging route requires a 3-D grid");
    const int n0 = q.shape[0], n1 = q.shape[1], n2 = q.shape[2];
    const std::vector<double> kern = gaussian_kernel(sigma);
    const int r = (static_cast<int>(kern.size()) - 1) / 2;

    std::vector<std::array<int, 3>> px(static_cast<std::size_t>(q.count()));
    for (int i = 0; i < q.count(); ++i)
        px[static_cast<std::size_t>(i)] = {q.z(i, 0), q.z(i, 1), q.z(i, 2)};
    std::sort(px.begin(), px.end());
    px.erase(std::unique(px.begin(), px.end()), px.end());

    std::vector<double> prefix(kern.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < kern.size(); ++i) prefix[i] = (acc += kern[i]);
    const auto clipped_mass = [&](int z, int n) {
        const int a = std::max(0, z - r) - z + r;
        const int b = std::min(n - 1, z + r) - z + r;
        return prefix[static_cast<std::size_t>(b)] -
               (a > 0 ? prefix[static_cast<std::size_t>(a - 1)] : 0.0);
    };
    double total = 0.0;
    for (const auto& p : px)
        total += clipped_mass(p[0], n0) * clipped_mass(p[1], n1) * clipped_mass(p[2], n2);
    const double mean =
        total / (static_cast<double>(n0) * static_cast<double>(n1) *
                 static_cast<double>(n2));

    RunLabeler labeler(q.shape);
    std::vector<double> buf(static_cast<std::size_t>(n1) * n2, 0.0);
    std::vector<int> lmin(static_cast<std::size_t>(n1), n2);
    std::vector<int> lmax(static_cast<std::size_t>(n1), -1);

    std::size_t lo_pt = 0, hi_pt = 0;  // active window of px, sorted by z0
    const int i0_first = std::max(0, px.front()[0] - r);
    const int i0_last = std::min(n0 - 1, px.back()[0] + r);
    for (int i0 = i0_first; i0 <= i0_last; ++i0) {
        while (hi_pt < px.size() && px[hi_pt][0] <= i0 + r) ++hi_pt;
        while (lo_pt < hi_pt && px[lo_pt][0] < i0 - r) ++lo_pt;

        for (std::size_t p = lo_pt; p < hi_pt; ++p) {
            const auto& z = px[p];
            const double f0 = kern[static_cast<std::size_t>(i0 - z[0] + r)];
            const int a1 = std::max(0, z[1] - r), b1 = std::min(n1 - 1, z[1] + r);
            const int a2 = std::max(0, z[2] - r), b2 = std::min(n2 - 1, z[2] + r);
            for (int i1 = a1; i1 <= b1; ++i1) {
                const double f01 = f0 * kern[static_cast<std::size_t>(i1 - z[1] + r)];
                double* row = buf.data() + static_cast<std::size_t>(i1) * n2;
                const double* kp = kern.data() + (a2 - z[2] + r);
                for (int i2 = a2; i2 <= b2; ++i2)
                    row[i2] += f01 * kp[i2 - a2];
                if (a2 < lmin[static_cast<std::size_t>(i1)])
                    lmin[static_cast<std::size_t>(i1)] = a2;
                if (b2 > lmax[static_cast<std::size_t>(i1)])
                    lmax[static_cast<std::size_t>(i1)] = b2;
            }
        }

        for (int i1 = 0; i1 < n1; ++i1) {
            if (lmax[static_cast<std::size_t>(i1)] < 0) continue;
            double* row = buf.data() + static_cast<std::size_t>(i1) * n2;
            const int a2 = lmin[static_cast<std::size_t>(i1)];
            const int b2 = lmax[static_cast<std::size_t>(i1)];
            const std::int64_t line = static_cast<std::int64_t>(i0) * n1 + i1;
            int c = a2;
            while (c <= b2) {
                if (row[c] > mean) {
                    const int lo = c;
                    while (c <= b2 && row[c] > mean) ++c;
                    labeler.add_run(line, lo, c - 1);
                } else {
                    ++c;
                }
            }
            for (int i2 = a2; i2 <= b2; ++i2) row[i2] = 0.0;
            lmin[static_cast<std::size_t>(i1)] = n2;
            lmax[static_cast<std::size_t>(i1)] = -1;
        }
    }
    return labeler.finish(min_size);
}

inline LabeledComponents filter_threshold_label_dense(const QuantizedPoints& q,
                                                      double sigma,
                                                      std::int64_t min_size) {
    const BinaryImage b = rasterize(q);
    const Image filtered = gaussian_filter(b.grid, sigma);
    return label_components(threshold_mean(filtered), min_size);
}

}  // namespace detail

// Deterministic cost model: per-point accumulation costs about nnz * w^3,
// dense separable filtering about ndim * |grid| * w; the sparse route wins
// when nnz * w^2 < ndim * |grid|. Both routes compute the same map up to
// floating-point summation order.
inline bool prefer_sparse(const QuantizedPoints& q, double sigma) {
    if (q.ndim() != 3) return false;
    const double w = 2.0 * kernel_radius(sigma) + 1.0;
    double nvox = 1.0;
    for (int e : q.shape) nvox *= e;
    return static_cast<double>(q.count()) * w * w < 3.0 * nvox;
}

// Full substep chain on quantized points: filter, mean-threshold, label,
// discard small components. No component can survive when min_size reaches
// the voxel count, so that degenerate regime short-circuits.
inline LabeledComponents filter_threshold_label(const QuantizedPoints& q,
                                                double sigma,
                                                std::int64_t min_size) {
    std::int64_t nvox = 1;
    for (int e : q.shape) nvox *= e;
    if (min_size >= nvox) {
        LabeledComponents empty;
        empty.shape = q.shape;
        return empty;
    }
    if (prefer_sparse(q, sigma))
        return detail::filter_threshold_label_sparse(q, sigma, min_size);
    return detail::filter_threshold_label_dense(q, sigma, min_size);
}

// ---------------------------------------------------------------------------
// Debug dumps (portable graymap / bitmap)
// ---------------------------------------------------------------------------

namespace detail {

inline void write_pgm_2d(const double* data, int h, int w, double vmin,
                         double vmax, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << "P5\n" << w << " " << h << "\n255\n";
    const double scale = vmax > vmin ? 255.0 / (vmax - vmin) : 0.0;
    std::vector<unsigned char> row(static_cast<std::size_t>(w));
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j)
            row[static_cast<std::size_t>(j)] = static_cast<unsigned char>(
                std::lround((data[static_cast<std::size_t>(i) * w + j] - vmin) * scale));
        f.write(reinterpret_cast<const char*>(row.data()), w);
    }
    if (!f) throw Error("failed writing " + path);
}

inline void write_pbm_2d(const double* data, int h, int w, double threshold,
                         const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << "P4\n" << w << " " << h << "\n";
    const int row_bytes = (w + 7) / 8;
    std::vector<unsigned char> row(static_cast<std::size_t>(row_bytes));
    for (int i = 0; i < h; ++i) {
        std::fill(row.begin(), row.end(), 0);
        for (int j = 0; j < w; ++j)
            if (data[static_cast<std::size_t>(i) * w + j] > threshold)
                row[static_cast<std::size_t>(j / 8)] |=
                    static_cast<unsigned char>(0x80u >> (j % 8));
        f.write(reinterpret_cast<const char*>(row.data()), row_bytes);
    }
    if (!f) throw Error("failed writing " + path);
}

inline std::string slice_path(const std::string& path, int slice) {
    const std::size_t slash = path.find_last_of('/');
    std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        dot = path.size();
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_%03d", slice);
    return path.substr(0, dot) + suffix + path.substr(dot);
}

}  // namespace detail

// Grayscale dump, min-max normalized to 8 bits; 3-D images are written as one
// file per leading-axis slice with an _NNN suffix before the extension.
inline void write_pnm(const Image& img, const std::string& path) {
    const int nd = img.ndim();
    double vmin = img[0], vmax = img[0];
    for (double v : img.data()) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (nd == 2) {
        detail::write_pgm_2d(img.data().data(), img.shape()[0], img.shape()[1],
                             vmin, vmax, path);
    } else if (nd == 3) {
        const std::int64_t slice_sz =
            static_cast<std::int64_t>(img.shape()[1]) * img.shape()[2];
        for (int s = 0; s < img.shape()[0]; ++s)
            detail::write_pgm_2d(img.data().data() + s * slice_sz, img.shape()[1],
                                 img.shape()[2], vmin, vmax,
                                 detail::slice_path(path, s));
    } else {
        throw DimensionError("write_pnm: only 2-D and 3-D images");
    }
}

// Bitmap dump of the foreground (entries above threshold); same slicing rule.
inline void write_pnm_binary(const Image& img, const std::string& path,
                             double threshold = 0.5) {
    const int nd = img.ndim();
    if (nd == 2) {
        detail::write_pbm_2d(img.data().data(), img.shape()[0], img.shape()[1],
                             threshold, path);
    } else if (nd == 3) {
        const std::int64_t slice_sz =
            static_cast<std::int64_t>(img.shape()[1]) * img.shape()[2];
        for (int s = 0; s < img.shape()[0]; ++s)
            detail::write_pbm_2d(img.data().data() + s * slice_sz, img.shape()[1],
                                 img.shape()[2], threshold,
                                 detail::slice_path(path, s));
    } else {
        throw DimensionError("write_pnm_binary: only 2-D and 3-D images");
    }
}

}  // namespace visclust

#endif  // VISCLUST_IMAGING_HPP
