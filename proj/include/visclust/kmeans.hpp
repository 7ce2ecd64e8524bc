#ifndef VISCLUST_KMEANS_HPP
#define VISCLUST_KMEANS_HPP

// Lloyd's k-means with k-means++ seeding, used as the benchmark baseline.

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "visclust/core.hpp"

namespace visclust {

struct KMeansResult {
    std::vector<int> labels;  // 1-based cluster ids
    Eigen::MatrixXd centers;  // n_c x d
    double inertia = 0.0;     // sum of squared distances to assigned centers
    int iterations = 0;
    std::vector<double> inertia_history;  // one entry per Lloyd pass
};

namespace detail {

inline int nearest_center(const Eigen::MatrixXd& centers,
                          const Eigen::RowVectorXd& p) {
    int best = 0;
    double best_d = (centers.row(0) - p).squaredNorm();
    for (int c = 1; c < centers.rows(); ++c) {
        const double d = (centers.row(c) - p).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace detail

// One Lloyd run from explicit initial centers (given as row indices into x).
// Empty clusters are reseeded to the point farthest from its current center.
inline KMeansResult kmeans_lloyd(const Eigen::MatrixXd& x,
                                 const std::vector<int>& init_centers,
                                 int max_iter = 300) {
    const int m = static_cast<int>(x.rows());
    const int n_c = static_cast<int>(init_centers.size());
    if (n_c < 1) throw InvalidInputError("kmeans_lloyd: need at least one center");
    if (n_c > m) throw InfeasibleError("kmeans_lloyd: more centers than points");
    if (max_iter < 1) throw InvalidInputError("kmeans_lloyd: max_iter must be >= 1");

    KMeansResult res;
    res.centers.resize(n_c, x.cols());
    for (int c = 0; c < n_c; ++c) {
        const int idx = init_centers[static_cast<std::size_t>(c)];
        if (idx < 0 || idx >= m)
            throw InvalidInputError("kmeans_lloyd: center index out of range");
        res.centers.row(c) = x.row(idx);
    }

    std::vector<int> assign(static_cast<std::size_t>(m), -1);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_c), 0);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < m; ++i) {
            const int c = detail::nearest_center(res.centers, x.row(i));
            if (c != assign[static_cast<std::size_t>(i)]) {
                assign[static_cast<std::size_t>(i)] = c;
                changed = true;
            }
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < n_c; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            int far_i = -1;
            double far_d = -1.0;
            for (int i = 0; i < m; ++i) {
                if (counts[static_cast<std::size_t>(
                        assign[static_cast<std::size_t>(i)])] <= 1)
                    continue;  // do not empty another cluster
                const double d =
                    (x.row(i) -
                     res.centers.row(assign[static_cast<std::size_t>(i)]))
                        .squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            if (far_i < 0) break;  // all clusters are singletons already
            --counts[static_cast<std::size_t>(
                assign[static_cast<std::size_t>(far_i)])];
            assign[static_cast<std::size_t>(far_i)] = c;
            ++counts[static_cast<std::size_t>(c)];
            changed = true;
        }
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n_c, x.cols());
        for (int i = 0; i < m; ++i)
            sums.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
        for (int c = 0; c < n_c; ++c)
            if (counts[static_cast<std::size_t>(c)] > 0)
                res.centers.row(c) =
                    sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);

        double inertia = 0.0;
        for (int i = 0; i < m; ++i)
            inertia +=
                (x.row(i) - res.centers.row(assign[static_cast<std::size_t>(i)]))
                    .squaredNorm();
        res.inertia_history.push_back(inertia);
        res.iterations = iter + 1;
        if (!changed) break;
    }

    res.inertia = res.inertia_history.back();
    res.labels.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        res.labels[static_cast<std::size_t>(i)] = assign[static_cast<std::size_t>(i)] + 1;
    return res;
}

namespace detail {

// k-means++ seeding: first center uniform, the rest by squared-distance
// weighted sampling against the nearest chosen center.
inline std::vector<int> kmeanspp_init(const Eigen::MatrixXd& x, int n_c, Rng& rng) {
    const int m = static_cast<int>(x.rows());
    std::vector<int> centers;
    centers.reserve(static_cast<std::size_t>(n_c));
    centers.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(m))));
    std::vector<double> d2(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        d2[static_cast<std::size_t>(i)] =
            (x.row(i) - x.row(centers[0])).squaredNorm();
    while (static_cast<int>(centers.size()) < n_c) {
        double total = 0.0;
        for (double v : d2) total += v;
        int pick;
        if (total <= 0.0) {
            pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
        } else {
            const double target = rng.uniform01() * total;
            double cum = 0.0;
            pick = m - 1;
            for (int i = 0; i < m; ++i) {
                cum += d2[static_cast<std::size_t>(i)];
                if (cum >= target) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(pick);
        for (int i = 0; i < m; ++i) {
            const double d = (x.row(i) - x.row(pick)).squaredNorm();
            if (d < d2[static_cast<std::size_t>(i)]) d2[static_cast<std::size_t>(i)] = d;
        }
    }
    return centers;
}

}  // namespace detail

// Best-inertia result over independent k-means++ restarts; ties keep the
// earliest restart so the outcome is deterministic for a given generator.
inline KMeansResult kmeans(const Eigen::MatrixXd& x, int n_c, Rng& rng,
                           int restarts = 10, int max_iter = 300) {
    const int m = static_cast<int>(x.rows());
    if (m < 1) throw InvalidInputError("kmeans: empty dataset");
    if (n_c < 1) throw InvalidInputError("kmeans: need at least one cluster");
    if (n_c > m) throw InfeasibleError("kmeans: more clusters than points");
    if (restarts < 1) throw InvalidInputError("kmeans: restarts must be >= 1");

    KMeansResult best;
    for (int r = 0; r < restarts; ++r) {
        KMeansResult cur =
            kmeans_lloyd(x, detail::kmeanspp_init(x, n_c, rng), max_iter);
        if (r == 0 || cur.inertia < best.inertia) best = std::move(cur);
    }
    return best;
}

}  // namespace visclust

#endif  // VISCLUST_KMEANS_HPP
