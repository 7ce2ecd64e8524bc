#ifndef VISCLUST_PROJECTIONS_HPP
#define VISCLUST_PROJECTIONS_HPP

// Random orthonormal projections: sampling from the Stiefel manifold,
// applying projections to data, total variance, and a Monte-Carlo estimate of
// the covering radius of a projection set.

#include <Eigen/Dense>
#include <Eigen/QR>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "visclust/core.hpp"
#include "visclust/dataset.hpp"

namespace visclust {

// A k x d matrix with orthonormal rows (a point on the Stiefel manifold).
class ProjectionBasis {
public:
    explicit ProjectionBasis(Eigen::MatrixXd q) : q_(std::move(q)) {
        if (q_.rows() < 1 || q_.cols() < q_.rows())
            throw DimensionError("ProjectionBasis: need 1 <= k <= d");
        const Eigen::MatrixXd gram = q_ * q_.transpose();
        const double err =
            (gram - Eigen::MatrixXd::Identity(q_.rows(), q_.rows()))
                .cwiseAbs()
                .maxCoeff();
        if (err > 1e-8)
            throw InvalidInputError(
                "ProjectionBasis: rows are not orthonormal (deviation " +
                std::to_string(err) + ")");
    }

    int k() const { return static_cast<int>(q_.rows()); }
    int dim() const { return static_cast<int>(q_.cols()); }
    const Eigen::MatrixXd& matrix() const { return q_; }

    // The rank-k orthogonal projector q^T q (d x d, symmetric, idempotent).
    Eigen::MatrixXd projector() const { return q_.transpose() * q_; }

private:
    Eigen::MatrixXd q_;
};

// Draws a uniformly distributed k x d row-orthonormal matrix: fill a d x k
// matrix with standard normals (row-major draw order), take its thin QR and
// flip signs so the triangular factor has a nonnegative diagonal. The sign
// fix makes the result a pure function of the Gaussian draw.
inline ProjectionBasis sample_stiefel(int k, int d, Rng& rng) {
    if (k < 1 || d < k) throw DimensionError("sample_stiefel: need 1 <= k <= d");
    Eigen::MatrixXd g(d, k);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
    const Eigen::MatrixXd r =
        qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    for (int j = 0; j < k; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return ProjectionBasis(q.transpose());
}

// A list of bases sharing one (k, d) shape, tagged with the seed that made it.
struct ProjectionSet {
    int k = 0;
    int d = 0;
    std::uint64_t seed = 0;
    std::vector<ProjectionBasis> bases;
};

inline ProjectionSet make_projection_set(std::vector<ProjectionBasis> bases,
                                         std::uint64_t seed = 0) {
    if (bases.empty())
        throw InvalidInputError("make_projection_set: need at least one basis");
    ProjectionSet set;
    set.k = bases.front().k();
    set.d = bases.front().dim();
    set.seed = seed;
    for (const auto& b : bases)
        if (b.k() != set.k || b.dim() != set.d)
            throw DimensionError("make_projection_set: mixed basis shapes");
    set.bases = std::move(bases);
    return set;
}

// n independent draws from one seeded stream; replaying the seed reproduces
// the identical list.
inline ProjectionSet sample_projection_set(int k, int d, int n,
                                           std::uint64_t seed) {
    if (n < 1) throw InvalidInputError("sample_projection_set: need n >= 1");
    Rng rng(seed);
    std::vector<ProjectionBasis> bases;
    bases.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) bases.push_back(sample_stiefel(k, d, rng));
    auto set = make_projection_set(std::move(bases), seed);
    return set;
}

inline Eigen::MatrixXd project(const ProjectionBasis& q,
                               const Eigen::MatrixXd& x) {
    if (x.cols() != q.dim())
        throw DimensionError("project: data dim " + std::to_string(x.cols()) +
                             " does not match basis dim " +
                             std::to_string(q.dim()));
    return x * q.matrix().transpose();
}

inline Dataset project(const ProjectionBasis& q, const Dataset& x) {
    Dataset out;
    out.points = project(q, x.points);
    out.labels = x.labels;
    return out;
}

// Sample total variance: sum of squared distances to the mean over (m - 1).
// Equals the pairwise form sum_{i<j} |x_i - x_j|^2 / (m(m-1)); the tests pin
// that identity against an independent evaluation.
inline double total_variance(const Eigen::MatrixXd& x) {
    if (x.rows() < 2)
        throw InsufficientDataError("total_variance: need at least two points");
    const Eigen::RowVectorXd mean = x.colwise().mean();
    return (x.rowwise() - mean).squaredNorm() /
           static_cast<double>(x.rows() - 1);
}

// Monte-Carlo covering radius: max over uniform probe projectors of the
// minimal Frobenius distance to the set's projectors.
inline double covering_radius_estimate(const ProjectionSet& set, int probes,
                                       Rng& rng) {
    if (set.bases.empty())
        throw InvalidInputError("covering_radius_estimate: empty set");
    if (probes < 1)
        throw InvalidInputError("covering_radius_estimate: need probes >= 1");
    std::vector<Eigen::MatrixXd> projectors;
    projectors.reserve(set.bases.size());
    for (const auto& b : set.bases) projectors.push_back(b.projector());

    double radius = 0.0;
    for (int i = 0; i < probes; ++i) {
        const Eigen::MatrixXd probe =
            sample_stiefel(set.k, set.d, rng).projector();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : projectors) {
            const double dist = (probe - p).norm();
            if (dist < best) best = dist;
        }
        if (best > radius) radius = best;
    }
    return radius;
}

}  // namespace visclust

#endif  // VISCLUST_PROJECTIONS_HPP
