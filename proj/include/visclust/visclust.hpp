#ifndef VISCLUST_VISCLUST_HPP
#define VISCLUST_VISCLUST_HPP

// Projection-image clustering: repeatedly project the scaled data to a 2-D
// (then 3-D) subspace, turn the projection into a filtered binary image,
// count connected components, and accept the first partition whose realized
// cluster-size division matches the requested one. Includes the adaptive
// filter scale, 4-sigma outlier withholding, subsampling with 1-NN backfill,
// a recursive binary fallback, and a mode that infers the cluster count.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "visclust/core.hpp"
#include "visclust/dataset.hpp"
#include "visclust/imaging.hpp"
#include "visclust/projections.hpp"

namespace visclust {

enum class Status { satisfied, division_not_satisfied, fallback_binary, auto_count };

inline const char* status_name(Status s) {
    switch (s) {
        case Status::satisfied: return "satisfied";
        case Status::division_not_satisfied: return "division-not-satisfied";
        case Status::fallback_binary: return "fallback-binary";
        case Status::auto_count: return "auto-count";
    }
    return "unknown";
}

struct VisClustConfig {
    int n_c = 0;                   // required by cluster(); auto mode infers it
    double t = 0.1;                // division acceptance threshold (L1)
    double s = 1.25;               // initial filter scale factor
    int u = 0;                     // subsample size; 0 means all points
    std::vector<double> division;  // target cluster fractions; empty = uniform
    std::uint64_t seed = 42;
    int budget_2d = 5000;          // projection budget in 2-D
    int budget_3d = 2000;          // projection budget in 3-D
    std::optional<ProjectionSet> projections;  // user-supplied bases
    std::optional<Eigen::MatrixXd> embedding;  // precomputed m x k embedding
};

struct Partition {
    std::vector<int> labels;       // 1..n_out for every point
    std::vector<double> division;  // realized cluster fractions, sum 1
    Status status = Status::division_not_satisfied;
    std::int64_t iterations_used = 0;
    int k_used = 0;
    double final_s = 0.0;

    bool division_met() const { return status != Status::division_not_satisfied; }
};

// Derived-seed stream tags, so adding a consumer never shifts another stream.
namespace stream {
constexpr std::uint64_t kProjection = 1;  // index: target dimension k
constexpr std::uint64_t kSigma = 2;       // index: global iteration number
constexpr std::uint64_t kSubsample = 3;
constexpr std::uint64_t kScanProjection = 4;
constexpr std::uint64_t kScanSigma = 5;   // index: scan iteration number
constexpr std::uint64_t kRecursive = 6;   // index: recursion level
}  // namespace stream

// ---------------------------------------------------------------------------
// Adaptive scale
// ---------------------------------------------------------------------------

struct AdaptHistory {
    int too_few = 0;   // iterations with fewer components than requested
    int too_many = 0;  // iterations with more components than requested
    int total = 0;
};

// After each 250-iteration window: more than 80% too few components raises s
// by 25%, more than 80% too many lowers it by 25%; adjustments are clamped to
// [0.1, 10] to keep the multiplicative updates from running away.
inline double adapt_scale(const AdaptHistory& h, double s) {
    if (h.total != 250)
        throw InvalidInputError("adapt_scale: history must cover exactly 250 iterations");
    if (h.too_few > 200) return std::clamp(s * 1.25, 0.1, 10.0);
    if (h.too_many > 200) return std::clamp(s * 0.75, 0.1, 10.0);
    return s;
}

// ---------------------------------------------------------------------------
// Outliers and backfill
// ---------------------------------------------------------------------------

// Flag points deviating more than 4 sample standard deviations from the mean
// in any coordinate; constant coordinates flag nothing.
inline std::vector<bool> outlier_mask(const Eigen::MatrixXd& x) {
    const int m = static_cast<int>(x.rows());
    if (m < 2) throw InsufficientDataError("outlier_mask: need at least 2 points");
    std::vector<bool> mask(static_cast<std::size_t>(m), false);
    for (int c = 0; c < x.cols(); ++c) {
        const double mean = x.col(c).mean();
        const double sd =
            std::sqrt((x.col(c).array() - mean).square().sum() / (m - 1));
        if (sd == 0.0) continue;
        for (int i = 0; i < m; ++i)
            if (std::abs(x(i, c) - mean) > 4.0 * sd)
                mask[static_cast<std::size_t>(i)] = true;
    }
    return mask;
}

// Assign every 0-labeled point the label of its nearest (Euclidean, ties to
// the lowest row index) point among those labeled before the call.
inline std::vector<int> backfill(const Eigen::MatrixXd& x, std::vector<int> labels) {
    const int m = static_cast<int>(x.rows());
    if (static_cast<int>(labels.size()) != m)
        throw InvalidInputError("backfill: label count does not match points");
    std::vector<int> assigned, missing;
    for (int i = 0; i < m; ++i)
        (labels[static_cast<std::size_t>(i)] > 0 ? assigned : missing).push_back(i);
    if (assigned.empty()) throw BackfillError("backfill: no assigned points");
    if (missing.empty()) return labels;

    const int na = static_cast<int>(assigned.size());
    Eigen::MatrixXd a(na, x.cols());
    for (int j = 0; j < na; ++j) a.row(j) = x.row(assigned[static_cast<std::size_t>(j)]);
    const Eigen::VectorXd a2 = a.rowwise().squaredNorm();
    for (int i : missing) {
        // argmin over assigned of |a|^2 - 2 a.p (the |p|^2 term is constant)
        const Eigen::VectorXd score = a2 - 2.0 * (a * x.row(i).transpose());
        int best = 0;
        for (int j = 1; j < na; ++j)
            if (score(j) < score(best)) best = j;
        labels[static_cast<std::size_t>(i)] =
            labels[static_cast<std::size_t>(assigned[static_cast<std::size_t>(best)])];
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Internals shared by cluster(), recursive_binary(), auto_cluster_count()
// ---------------------------------------------------------------------------

namespace detail {

// L1 distance between two divisions as unordered multisets: both sides are
// sorted first, which attains the minimum over cluster relabelings, since
// component numbering carries no meaning.
inline double sorted_division_l1(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
    return l1;
}

// Renumber nonzero labels to contiguous 1..n_eff (by ascending old value, so
// the result does not depend on point order); returns n_eff.
inline int compress_labels(std::vector<int>& labels) {
    int max_lab = 0;
    for (int v : labels) max_lab = std::max(max_lab, v);
    std::vector<int> remap(static_cast<std::size_t>(max_lab) + 1, 0);
    for (int v : labels)
        if (v > 0) remap[static_cast<std::size_t>(v)] = 1;
    int n_eff = 0;
    for (int v = 1; v <= max_lab; ++v)
        if (remap[static_cast<std::size_t>(v)]) remap[static_cast<std::size_t>(v)] = ++n_eff;
    for (int& v : labels)
        if (v > 0) v = remap[static_cast<std::size_t>(v)];
    return n_eff;
}

inline std::vector<double> division_of(const std::vector<int>& labels, int n_out) {
    std::vector<double> div(static_cast<std::size_t>(n_out), 0.0);
    for (int v : labels) div[static_cast<std::size_t>(v - 1)] += 1.0;
    for (double& f : div) f /= static_cast<double>(labels.size());
    return div;
}

struct CoreConfig {
    int n_c = 0;
    double t = 0.1;
    double s = 1.25;
    int u = 0;  // already resolved to [1, m] by the caller
    std::vector<double> division;
    std::uint64_t seed = 0;
    int budget_2d = 5000;
    int budget_3d = 2000;
    const ProjectionSet* projections = nullptr;
    bool embedding_mode = false;  // points are already the k-dim representation
};

struct CoreResult {
    bool accepted = false;
    bool has_labels = false;  // labels/division hold the best-effort candidate
    std::vector<int> labels;
    std::vector<double> division;
    std::int64_t iterations = 0;
    int k_used = 0;
    double final_s = 0.0;
};

// One full pass of the projection loop (both k phases) without the recursive
// fallback. Returns the accepted partition or the best-effort candidate:
// preferring, among iterations whose realized cluster count equals n_c, the
// smallest division distance, and otherwise the closest cluster count.
inline CoreResult cluster_core(const Eigen::MatrixXd& pts, const CoreConfig& cc) {
    const int m = static_cast<int>(pts.rows());
    CoreResult res;
    res.final_s = cc.s;
    if (cc.n_c == 1) {
        res.accepted = true;
        res.has_labels = true;
        res.labels.assign(static_cast<std::size_t>(m), 1);
        res.division = {1.0};
        return res;
    }

    Eigen::MatrixXd scaled = scale_minmax(pts);
    // The imaging grid needs at least two axes; lift 1-D data with a zero column.
    if (scaled.cols() == 1) {
        scaled.conservativeResize(Eigen::NoChange, 2);
        scaled.col(1).setZero();
    }
    const int d = static_cast<int>(scaled.cols());

    std::vector<int> active;
    active.reserve(static_cast<std::size_t>(m));
    if (m >= 2) {
        const std::vector<bool> mask = outlier_mask(scaled);
        for (int i = 0; i < m; ++i)
            if (!mask[static_cast<std::size_t>(i)]) active.push_back(i);
    }
    if (static_cast<int>(active.size()) < 2) {
        active.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) active[static_cast<std::size_t>(i)] = i;
    }
    if (cc.u < static_cast<int>(active.size())) {
        Rng sub_rng(derive_seed(cc.seed, stream::kSubsample));
        const std::vector<int> pick =
            sample_indices(static_cast<int>(active.size()), cc.u, sub_rng);
        std::vector<int> kept;
        kept.reserve(pick.size());
        for (int j : pick) kept.push_back(active[static_cast<std::size_t>(j)]);
        active = std::move(kept);
    }
    const int ma = static_cast<int>(active.size());
    if (ma < 2) return res;
    Eigen::MatrixXd xa(ma, d);
    for (int j = 0; j < ma; ++j) xa.row(j) = scaled.row(active[static_cast<std::size_t>(j)]);

    std::vector<std::pair<int, int>> phases;  // (k, budget)
    if (cc.projections) {
        phases.emplace_back(cc.projections->k,
                            static_cast<int>(cc.projections->bases.size()));
    } else if (cc.embedding_mode) {
        phases.emplace_back(d, d == 2 ? cc.budget_2d : cc.budget_3d);
    } else {
        phases.emplace_back(2, cc.budget_2d);
        if (d >= 3) phases.emplace_back(3, cc.budget_3d);
    }

    double s_cur = cc.s;
    AdaptHistory hist;
    double best_l1 = std::numeric_limits<double>::infinity();  // candidates with n_eff == n_c
    int best_gap = std::numeric_limits<int>::max();            // everything else
    std::int64_t it_global = 0;

    for (const auto& [k, budget] : phases) {
        // In embedding mode k == d and the sampled bases act as in-plane
        // rotations and reflections of the given representation.
        Rng proj_rng(derive_seed(cc.seed, stream::kProjection,
                                 static_cast<std::uint64_t>(k)));
        for (int l = 0; l < budget; ++l) {
            ++it_global;
            ++res.iterations;
            res.k_used = k;
            res.final_s = s_cur;

            const ProjectionBasis basis =
                cc.projections ? cc.projections->bases[static_cast<std::size_t>(l)]
                               : sample_stiefel(k, d, proj_rng);
            const Eigen::MatrixXd y = project(basis, xa);
            const QuantizedPoints qp = quantize(y);
            Rng sigma_rng(derive_seed(cc.seed, stream::kSigma,
                                      static_cast<std::uint64_t>(it_global)));
            const double sigma = estimate_sigma(y, s_cur, sigma_rng);
            const LabeledComponents comps =
                filter_threshold_label(qp, sigma, min_component_size(sigma, k));

            if (comps.n_cc < cc.n_c) ++hist.too_few;
            else if (comps.n_cc > cc.n_c) ++hist.too_many;
            ++hist.total;

            const bool accept_path = comps.n_cc == cc.n_c && comps.n_cc > 0;
            // Candidate bookkeeping is skipped once it cannot improve: the
            // populated-cluster count never exceeds the component count.
            bool try_fallback = !accept_path && comps.n_cc > 0 &&
                                !std::isfinite(best_l1) && best_gap > 0;
            if (try_fallback && comps.n_cc < cc.n_c &&
                cc.n_c - comps.n_cc >= best_gap)
                try_fallback = false;

            std::vector<int> la;
            int n_eff = 0;
            bool materialize = false;
            if (accept_path || try_fallback) {
                la = assign_points(comps, qp);
                n_eff = compress_labels(la);
                materialize = accept_path ||
                              (n_eff >= 1 && std::abs(n_eff - cc.n_c) < best_gap);
            }

            if (materialize && n_eff >= 1) {
                std::vector<int> full(static_cast<std::size_t>(m), 0);
                for (int j = 0; j < ma; ++j)
                    full[static_cast<std::size_t>(active[static_cast<std::size_t>(j)])] =
                        la[static_cast<std::size_t>(j)];
                full = backfill(scaled, full);
                const std::vector<double> div = division_of(full, n_eff);

                if (comps.n_cc == cc.n_c && n_eff == cc.n_c) {
                    const double l1 = sorted_division_l1(div, cc.division);
                    if (l1 < cc.t) {
                        res.accepted = true;
                        res.has_labels = true;
                        res.labels = std::move(full);
                        res.division = div;
                        return res;
                    }
                    if (l1 < best_l1) {
                        best_l1 = l1;
                        res.has_labels = true;
                        res.labels = std::move(full);
                        res.division = div;
                    }
                } else if (!std::isfinite(best_l1) &&
                           std::abs(n_eff - cc.n_c) < best_gap) {
                    best_gap = std::abs(n_eff - cc.n_c);
                    res.has_labels = true;
                    res.labels = std::move(full);
                    res.division = div;
                }
            }

            if (hist.total == 250) {
                s_cur = adapt_scale(hist, s_cur);
                hist = AdaptHistory{};
                res.final_s = s_cur;
            }
        }
    }
    return res;
}

struct RecResult {
    bool success = false;
    std::vector<int> labels;
    std::int64_t iterations = 0;
    int k_used = 0;
    double final_s = 0.0;
};

// Peel off the presumably smallest cluster with a binary run, then recurse on
// the remainder with the remaining division renormalized. Each level gets a
// fresh derived seed and the full projection budget; levels run the plain
// projection loop (no nested fallback, which would recurse forever on the
// binary base case).
inline RecResult recursive_binary_impl(const Eigen::MatrixXd& pts,
                                       const CoreConfig& base) {
    const int m = static_cast<int>(pts.rows());
    RecResult out;
    out.labels.assign(static_cast<std::size_t>(m), 0);
    out.final_s = base.s;

    std::vector<int> remaining(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) remaining[static_cast<std::size_t>(i)] = i;
    std::vector<double> div_rem = base.division;
    int next_label = 1;
    std::uint64_t level = 0;

    while (true) {
        const int n_rem = static_cast<int>(remaining.size());
        if (div_rem.size() == 1) {
            for (int i : remaining) out.labels[static_cast<std::size_t>(i)] = next_label;
            ++next_label;
            out.success = true;
            break;
        }
        double tot = 0.0;
        for (double f : div_rem) tot += f;
        std::size_t mi = 0;
        for (std::size_t j = 1; j < div_rem.size(); ++j)
            if (div_rem[j] < div_rem[mi]) mi = j;
        const double target_small = div_rem[mi] / tot;

        if (n_rem < 2) break;  // failure: nothing left to split
        CoreConfig sub = base;
        sub.n_c = 2;
        sub.division = {target_small, 1.0 - target_small};
        sub.seed = derive_seed(base.seed, stream::kRecursive, level);
        sub.u = std::min(sub.u, n_rem);

        Eigen::MatrixXd xr(n_rem, pts.cols());
        for (int j = 0; j < n_rem; ++j)
            xr.row(j) = pts.row(remaining[static_cast<std::size_t>(j)]);
        const CoreResult r = cluster_core(xr, sub);
        out.iterations += r.iterations;
        out.k_used = r.k_used;
        out.final_s = r.final_s;
        if (!r.accepted) break;

        // The output label whose fraction best matches the small target is
        // the peeled cluster.
        const int small_lab =
            std::abs(r.division[0] - target_small) <=
                    std::abs(r.division[1] - target_small)
                ? 1
                : 2;
        if (div_rem.size() == 2) {
            for (int j = 0; j < n_rem; ++j) {
                const int i = remaining[static_cast<std::size_t>(j)];
                out.labels[static_cast<std::size_t>(i)] =
                    r.labels[static_cast<std::size_t>(j)] == small_lab
                        ? next_label
                        : next_label + 1;
            }
            next_label += 2;
            out.success = true;
            break;
        }
        std::vector<int> rest;
        rest.reserve(remaining.size());
        for (int j = 0; j < n_rem; ++j) {
            const int i = remaining[static_cast<std::size_t>(j)];
            if (r.labels[static_cast<std::size_t>(j)] == small_lab)
                out.labels[static_cast<std::size_t>(i)] = next_label;
            else
                rest.push_back(i);
        }
        ++next_label;
        div_rem.erase(div_rem.begin() + static_cast<std::ptrdiff_t>(mi));
        remaining = std::move(rest);
        ++level;
    }

    // On failure the unpeeled remainder forms one best-effort cluster.
    if (!out.success)
        for (int i : remaining) out.labels[static_cast<std::size_t>(i)] = next_label;
    return out;
}

inline CoreConfig resolve_config(int m, int d, const VisClustConfig& cfg,
                                 bool need_n_c) {
    if (m < 1) throw InvalidInputError("cluster: empty dataset");
    if (d < 1) throw InvalidInputError("cluster: dimensionless dataset");
    CoreConfig cc;
    cc.n_c = cfg.n_c;
    if (need_n_c) {
        if (cfg.n_c < 1)
            throw InvalidInputError("cluster: cluster count must be at least 1");
        if (cfg.n_c > m)
            throw InfeasibleError("cluster: more clusters requested than points");
    }
    if (cfg.t <= 0) throw InvalidInputError("cluster: threshold t must be positive");
    if (cfg.s <= 0) throw InvalidInputError("cluster: scale s must be positive");
    cc.t = cfg.t;
    cc.s = cfg.s;
    cc.u = cfg.u == 0 ? m : cfg.u;
    if (cc.u < 1 || cc.u > m)
        throw InvalidInputError("cluster: subsample size out of range");
    if (cfg.budget_2d < 0 || cfg.budget_3d < 0)
        throw InvalidInputError("cluster: projection budgets must be nonnegative");
    cc.budget_2d = cfg.budget_2d;
    cc.budget_3d = cfg.budget_3d;
    cc.seed = cfg.seed;

    if (need_n_c) {
        if (cfg.division.empty()) {
            cc.division.assign(static_cast<std::size_t>(cfg.n_c),
                               1.0 / cfg.n_c);
        } else {
            if (static_cast<int>(cfg.division.size()) != cfg.n_c)
                throw InvalidInputError("cluster: division length differs from cluster count");
            double sum = 0.0;
            for (double f : cfg.division) {
                if (f < 0) throw InvalidInputError("cluster: division entries must be nonnegative");
                sum += f;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw InvalidInputError("cluster: division must sum to 1");
            cc.division = cfg.division;
        }
    }

    if (cfg.projections && cfg.embedding)
        throw InvalidInputError("cluster: supply either projections or an embedding, not both");
    if (cfg.projections) {
        if (cfg.projections->bases.empty())
            throw InvalidInputError("cluster: supplied projection set is empty");
        if (cfg.projections->d != d)
            throw DimensionError("cluster: projection set dimension differs from data");
        if (cfg.projections->k != 2 && cfg.projections->k != 3)
            throw DimensionError("cluster: projection target dimension must be 2 or 3");
        cc.projections = &*cfg.projections;
    }
    if (cfg.embedding) {
        if (cfg.embedding->rows() != m)
            throw DimensionError("cluster: embedding row count differs from data");
        if (cfg.embedding->cols() != 2 && cfg.embedding->cols() != 3)
            throw DimensionError("cluster: embedding must have 2 or 3 columns");
        if (!cfg.embedding->allFinite())
            throw InvalidInputError("cluster: embedding has non-finite entries");
        cc.embedding_mode = true;
    }
    return cc;
}

inline Partition make_partition(std::vector<int> labels, Status st,
                                std::int64_t iters, int k_used, double final_s) {
    Partition p;
    const int n_out = compress_labels(labels);
    p.division = division_of(labels, std::max(n_out, 1));
    p.labels = std::move(labels);
    p.status = st;
    p.iterations_used = iters;
    p.k_used = k_used;
    p.final_s = final_s;
    return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

inline Partition cluster(const Dataset& x, const VisClustConfig& cfg) {
    const int m = x.size();
    detail::CoreConfig cc = detail::resolve_config(m, x.dim(), cfg, true);
    if (!x.points.allFinite())
        throw InvalidInputError("cluster: dataset has non-finite entries");
    const Eigen::MatrixXd& pts = cc.embedding_mode ? *cfg.embedding : x.points;

    detail::CoreResult main = detail::cluster_core(pts, cc);
    if (main.accepted)
        return detail::make_partition(std::move(main.labels), Status::satisfied,
                                      main.iterations, main.k_used, main.final_s);

    std::int64_t iters = main.iterations;
    if (cc.n_c >= 2) {
        detail::RecResult rec = detail::recursive_binary_impl(pts, cc);
        iters += rec.iterations;
        if (rec.success)
            return detail::make_partition(std::move(rec.labels),
                                          Status::fallback_binary, iters,
                                          rec.k_used, rec.final_s);
    }
    if (main.has_labels)
        return detail::make_partition(std::move(main.labels),
                                      Status::division_not_satisfied, iters,
                                      main.k_used, main.final_s);
    std::vector<int> ones(static_cast<std::size_t>(m), 1);
    return detail::make_partition(std::move(ones), Status::division_not_satisfied,
                                  iters, main.k_used, main.final_s);
}

// The fallback as a standalone call: peel the smallest division entry with
// binary runs. Fails by returning the peels found so far (remainder as one
// cluster) with status division-not-satisfied.
inline Partition recursive_binary(const Dataset& x, const VisClustConfig& cfg) {
    if (cfg.n_c < 2)
        throw InvalidInputError("recursive_binary: needs at least 2 clusters");
    detail::CoreConfig cc = detail::resolve_config(x.size(), x.dim(), cfg, true);
    if (!x.points.allFinite())
        throw InvalidInputError("recursive_binary: dataset has non-finite entries");
    const Eigen::MatrixXd& pts = cc.embedding_mode ? *cfg.embedding : x.points;
    detail::RecResult rec = detail::recursive_binary_impl(pts, cc);
    return detail::make_partition(
        std::move(rec.labels),
        rec.success ? Status::fallback_binary : Status::division_not_satisfied,
        rec.iterations, rec.k_used, rec.final_s);
}

// Infer the cluster count as the mode (ties to the smaller count) of the
// component counts seen over a 500-projection 2-D scan, then cluster.
inline Partition auto_cluster_count(const Dataset& x, const VisClustConfig& cfg) {
    const int m = x.size();
    if (m < 2) throw InsufficientDataError("auto_cluster_count: need at least 2 points");
    if (!cfg.division.empty())
        throw InvalidInputError("auto_cluster_count: division is derived, do not supply one");
    detail::CoreConfig cc = detail::resolve_config(m, x.dim(), cfg, false);
    if (!x.points.allFinite())
        throw InvalidInputError("auto_cluster_count: dataset has non-finite entries");
    const Eigen::MatrixXd& pts = cc.embedding_mode ? *cfg.embedding : x.points;

    Eigen::MatrixXd scaled = scale_minmax(pts);
    if (scaled.cols() == 1) {
        scaled.conservativeResize(Eigen::NoChange, 2);
        scaled.col(1).setZero();
    }
    const int d = static_cast<int>(scaled.cols());
    std::vector<int> active;
    {
        const std::vector<bool> mask = outlier_mask(scaled);
        for (int i = 0; i < m; ++i)
            if (!mask[static_cast<std::size_t>(i)]) active.push_back(i);
        if (static_cast<int>(active.size()) < 2) {
            active.resize(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) active[static_cast<std::size_t>(i)] = i;
        }
        if (cc.u < static_cast<int>(active.size())) {
            Rng sub_rng(derive_seed(cc.seed, stream::kSubsample));
            const std::vector<int> pick =
                sample_indices(static_cast<int>(active.size()), cc.u, sub_rng);
            std::vector<int> kept;
            kept.reserve(pick.size());
            for (int j : pick) kept.push_back(active[static_cast<std::size_t>(j)]);
            active = std::move(kept);
        }
    }
    const int ma = static_cast<int>(active.size());
    Eigen::MatrixXd xa(ma, d);
    for (int j = 0; j < ma; ++j) xa.row(j) = scaled.row(active[static_cast<std::size_t>(j)]);

    const int k = cc.embedding_mode ? d : 2;
    Rng proj_rng(derive_seed(cc.seed, stream::kScanProjection));
    std::vector<std::int64_t> freq;
    constexpr int kScanIterations = 500;
    for (int l = 0; l < kScanIterations; ++l) {
        const Eigen::MatrixXd y = project(sample_stiefel(k, d, proj_rng), xa);
        const QuantizedPoints qp = quantize(y);
        Rng sigma_rng(derive_seed(cc.seed, stream::kScanSigma,
                                  static_cast<std::uint64_t>(l)));
        const double sigma = estimate_sigma(y, cc.s, sigma_rng);
        const LabeledComponents comps =
            filter_threshold_label(qp, sigma, min_component_size(sigma, k));
        if (comps.n_cc <= 0) continue;
        if (comps.n_cc >= static_cast<int>(freq.size()))
            freq.resize(static_cast<std::size_t>(comps.n_cc) + 1, 0);
        ++freq[static_cast<std::size_t>(comps.n_cc)];
    }
    int n_c = 0;
    std::int64_t best = 0;
    for (std::size_t c = 1; c < freq.size(); ++c)
        if (freq[c] > best) {  // strict: ties keep the smaller count
            best = freq[c];
            n_c = static_cast<int>(c);
        }
    if (n_c == 0)
        throw NoStructureError("auto_cluster_count: no projection showed any component");

    VisClustConfig run = cfg;
    run.n_c = n_c;
    Partition p = cluster(x, run);
    p.iterations_used += kScanIterations;
    if (p.division_met()) p.status = Status::auto_count;
    return p;
}

}  // namespace visclust

#endif  // VISCLUST_VISCLUST_HPP
