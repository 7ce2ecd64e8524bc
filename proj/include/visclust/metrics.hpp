#ifndef VISCLUST_METRICS_HPP
#define VISCLUST_METRICS_HPP

// External-evaluation metrics: Rand index, a one-sided expected Rand index
// built from Stirling numbers of the second kind, the resulting adjusted Rand
// index, and best-match classification accuracy. All ratios are assembled
// from exact integers and rounded to double once, at the end.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "visclust/core.hpp"

namespace visclust {

using BigInt = boost::multiprecision::cpp_int;

struct ContingencyTable {
    // counts[i][j]: points with the i-th predicted label and j-th true label.
    std::vector<std::vector<std::int64_t>> counts;
    std::vector<std::int64_t> row_sums;  // per predicted label
    std::vector<std::int64_t> col_sums;  // per true label
    std::vector<int> row_labels;         // distinct predicted labels, ascending
    std::vector<int> col_labels;         // distinct true labels, ascending
    std::int64_t m = 0;
};

inline ContingencyTable contingency(const std::vector<int>& pred,
                                    const std::vector<int>& truth) {
    if (pred.size() != truth.size())
        throw InvalidInputError("contingency: label vectors differ in length");
    if (pred.empty())
        throw InsufficientDataError("contingency: no labels given");

    std::map<int, int> ri, ci;
    for (int v : pred) ri.emplace(v, 0);
    for (int v : truth) ci.emplace(v, 0);
    ContingencyTable t;
    for (auto& [lab, idx] : ri) {
        idx = static_cast<int>(t.row_labels.size());
        t.row_labels.push_back(lab);
    }
    for (auto& [lab, idx] : ci) {
        idx = static_cast<int>(t.col_labels.size());
        t.col_labels.push_back(lab);
    }
    t.counts.assign(t.row_labels.size(),
                    std::vector<std::int64_t>(t.col_labels.size(), 0));
    for (std::size_t i = 0; i < pred.size(); ++i)
        ++t.counts[static_cast<std::size_t>(ri[pred[i]])]
                  [static_cast<std::size_t>(ci[truth[i]])];
    t.row_sums.assign(t.row_labels.size(), 0);
    t.col_sums.assign(t.col_labels.size(), 0);
    for (std::size_t i = 0; i < t.counts.size(); ++i)
        for (std::size_t j = 0; j < t.counts[i].size(); ++j) {
            t.row_sums[i] += t.counts[i][j];
            t.col_sums[j] += t.counts[i][j];
        }
    t.m = static_cast<std::int64_t>(pred.size());
    return t;
}

namespace detail {

inline std::int64_t choose2(std::int64_t n) { return n * (n - 1) / 2; }

// Numerator of the Rand index over C(m, 2): the number of point pairs on
// which the two partitions agree.
inline std::int64_t rand_agreements(const ContingencyTable& t) {
    std::int64_t sum_ij = 0, sum_a = 0, sum_b = 0;
    for (std::size_t i = 0; i < t.counts.size(); ++i)
        for (std::size_t j = 0; j < t.counts[i].size(); ++j)
            sum_ij += choose2(t.counts[i][j]);
    for (auto v : t.row_sums) sum_a += choose2(v);
    for (auto v : t.col_sums) sum_b += choose2(v);
    return choose2(t.m) + 2 * sum_ij - sum_a - sum_b;
}

inline double big_ratio_to_double(const BigInt& num, const BigInt& den) {
    using Big100 = boost::multiprecision::cpp_bin_float_100;
    return (Big100(num) / Big100(den)).convert_to<double>();
}

}  // namespace detail

// Fraction of point pairs classified consistently by both partitions.
inline double rand_index(const ContingencyTable& t) {
    if (t.m < 2)
        throw InsufficientDataError("rand_index: need at least two points");
    return static_cast<double>(detail::rand_agreements(t)) /
           static_cast<double>(detail::choose2(t.m));
}

inline double rand_index(const std::vector<int>& pred,
                         const std::vector<int>& truth) {
    return rand_index(contingency(pred, truth));
}

// Stirling numbers of the second kind S(n, k), exact, built by the additive
// recurrence S(n, k) = k S(n-1, k) + S(n-1, k-1).
class StirlingCache {
public:
    StirlingCache(int max_n, int max_k) : max_n_(max_n), max_k_(max_k) {
        if (max_n < 0 || max_k < 0)
            throw InvalidInputError("StirlingCache: bounds must be nonnegative");
        table_.assign(static_cast<std::size_t>(max_n + 1) *
                          static_cast<std::size_t>(max_k + 1),
                      BigInt(0));
        cell(0, 0) = 1;
        for (int n = 1; n <= max_n; ++n)
            for (int k = 1; k <= std::min(n, max_k); ++k)
                cell(n, k) = k * cell(n - 1, k) + cell(n - 1, k - 1);
    }

    const BigInt& at(int n, int k) const {
        if (n < 0 || n > max_n_ || k < 0 || k > max_k_)
            throw InvalidInputError("StirlingCache: index out of range");
        return table_[static_cast<std::size_t>(n) *
                          static_cast<std::size_t>(max_k_ + 1) +
                      static_cast<std::size_t>(k)];
    }

    int max_n() const { return max_n_; }
    int max_k() const { return max_k_; }

private:
    BigInt& cell(int n, int k) {
        return table_[static_cast<std::size_t>(n) *
                          static_cast<std::size_t>(max_k_ + 1) +
                      static_cast<std::size_t>(k)];
    }

    int max_n_, max_k_;
    std::vector<BigInt> table_;
};

namespace detail {

// (S(m-1, k), S(m, k)) with O(k) memory; same recurrence as StirlingCache.
inline std::pair<BigInt, BigInt> stirling_pair(int m, int k) {
    if (m < 1 || k < 0) throw InvalidInputError("stirling_pair: need m >= 1, k >= 0");
    std::vector<BigInt> row(static_cast<std::size_t>(k) + 1, BigInt(0)), prev;
    row[0] = 1;  // row n = 0
    prev = row;
    for (int n = 1; n <= m; ++n) {
        prev = row;
        row[0] = 0;
        for (int j = 1; j <= k; ++j) row[static_cast<std::size_t>(j)] =
            j * prev[static_cast<std::size_t>(j)] + prev[static_cast<std::size_t>(j - 1)];
    }
    return {prev[static_cast<std::size_t>(k)], row[static_cast<std::size_t>(k)]};
}

// Exact numerator/denominator of the expected Rand index against a uniformly
// random partition of m points into n_cA nonempty clusters:
//   E = r B + (1 - r)(1 - B),  r = S(m-1, n_cA)/S(m, n_cA),
//   B = sum_j C(b_j, 2) / C(m, 2)   (b_j: true-partition cluster sizes).
inline std::pair<BigInt, BigInt> expected_rand_fraction(
    const ContingencyTable& t, const BigInt& s_m1, const BigInt& s_m) {
    std::int64_t sum_b = 0;
    for (auto v : t.col_sums) sum_b += choose2(v);
    const std::int64_t cm = choose2(t.m);
    const BigInt num = s_m1 * sum_b + (s_m - s_m1) * (cm - sum_b);
    const BigInt den = s_m * cm;
    return {num, den};
}

}  // namespace detail

// Expected Rand index of the predicted partition's cluster count against the
// fixed ground truth; the Stirling ratio is formed from exact integers.
inline double expected_rand_index(const ContingencyTable& t,
                                  const StirlingCache& stirling) {
    if (t.m < 2)
        throw InsufficientDataError("expected_rand_index: need at least two points");
    const int n_ca = static_cast<int>(t.row_labels.size());
    const auto& s_m = stirling.at(static_cast<int>(t.m), n_ca);
    const auto& s_m1 = stirling.at(static_cast<int>(t.m) - 1, n_ca);
    if (s_m == 0)
        throw UndefinedMetricError("expected_rand_index: S(m, n_cA) is zero");
    const auto [num, den] = detail::expected_rand_fraction(t, s_m1, s_m);
    return detail::big_ratio_to_double(num, den);
}

// Same expectation computed with the O(k)-memory rolling recurrence, for
// point counts where a full Stirling table would be too large.
inline double expected_rand_index(const ContingencyTable& t) {
    if (t.m < 2)
        throw InsufficientDataError("expected_rand_index: need at least two points");
    const int n_ca = static_cast<int>(t.row_labels.size());
    const auto [s_m1, s_m] = detail::stirling_pair(static_cast<int>(t.m), n_ca);
    if (s_m == 0)
        throw UndefinedMetricError("expected_rand_index: S(m, n_cA) is zero");
    const auto [num, den] = detail::expected_rand_fraction(t, s_m1, s_m);
    return detail::big_ratio_to_double(num, den);
}

// One-sided adjusted Rand index (RI - E[RI]) / (1 - E[RI]); the first
// argument must be the algorithm output, the second the ground truth.
inline double adjusted_rand_index(const std::vector<int>& pred,
                                  const std::vector<int>& truth) {
    const ContingencyTable t = contingency(pred, truth);
    if (t.m < 2)
        throw InsufficientDataError("adjusted_rand_index: need at least two points");
    const int n_ca = static_cast<int>(t.row_labels.size());
    const auto [s_m1, s_m] = detail::stirling_pair(static_cast<int>(t.m), n_ca);
    const auto [e_num, e_den] = detail::expected_rand_fraction(t, s_m1, s_m);
    if (e_num == e_den)
        throw UndefinedMetricError(
            "adjusted_rand_index: expected index equals 1 for these marginals");
    const std::int64_t agree = detail::rand_agreements(t);
    const std::int64_t cm = detail::choose2(t.m);
    // (agree/cm - e_num/e_den) / (1 - e_num/e_den), assembled exactly.
    const BigInt num = BigInt(agree) * e_den - e_num * cm;
    const BigInt den = BigInt(cm) * (e_den - e_num);
    return detail::big_ratio_to_double(num, den);
}

namespace detail {

// Exact min-cost assignment (Hungarian algorithm with potentials) on a square
// integer cost matrix; returns the column matched to each row.
inline std::vector<int> min_cost_assignment(
    const std::vector<std::vector<std::int64_t>>& cost) {
    const int n = static_cast<int>(cost.size());
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(static_cast<std::size_t>(n) + 1, 0),
        v(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0),
        way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<std::int64_t> minv(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = match[static_cast<std::size_t>(j0)];
            std::int64_t delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const std::int64_t cur =
                    cost[static_cast<std::size_t>(i0 - 1)]
                        [static_cast<std::size_t>(j - 1)] -
                    u[static_cast<std::size_t>(i0)] -
                    v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(
                        match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] =
                match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (match[static_cast<std::size_t>(j)] > 0)
            row_to_col[static_cast<std::size_t>(
                match[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return row_to_col;
}

}  // namespace detail

// Best-match accuracy: the contingency table is padded to a square, predicted
// labels are matched one-to-one to true labels by an exact assignment solver,
// and the matched count is divided by m.
inline double accuracy(const std::vector<int>& pred,
                       const std::vector<int>& truth) {
    const ContingencyTable t = contingency(pred, truth);
    const int nr = static_cast<int>(t.row_labels.size());
    const int nc = static_cast<int>(t.col_labels.size());
    if (nr > 64 || nc > 64)
        throw InvalidInputError("accuracy: more than 64 distinct labels");
    const int n = std::max(nr, nc);
    std::int64_t max_count = 0;
    for (const auto& row : t.counts)
        for (auto v : row) max_count = std::max(max_count, v);
    std::vector<std::vector<std::int64_t>> cost(
        static_cast<std::size_t>(n),
        std::vector<std::int64_t>(static_cast<std::size_t>(n), max_count));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j)
            cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                max_count - t.counts[static_cast<std::size_t>(i)]
                                    [static_cast<std::size_t>(j)];
    const auto assign = detail::min_cost_assignment(cost);
    std::int64_t matched = 0;
    for (int i = 0; i < nr; ++i) {
        const int j = assign[static_cast<std::size_t>(i)];
        if (j >= 0 && j < nc)
            matched += t.counts[static_cast<std::size_t>(i)]
                               [static_cast<std::size_t>(j)];
    }
    return static_cast<double>(matched) / static_cast<double>(t.m);
}

// ---------------------------------------------------------------------------
// Flat report
// ---------------------------------------------------------------------------

struct MetricsReport {
    double acc = 0, ri = 0, e_ri = 0, ari = 0;
    std::int64_t m = 0;
    int n_clusters_pred = 0, n_clusters_truth = 0;
};

inline MetricsReport evaluate_labels(const std::vector<int>& pred,
                                     const std::vector<int>& truth) {
    MetricsReport r;
    const ContingencyTable t = contingency(pred, truth);
    r.m = t.m;
    r.n_clusters_pred = static_cast<int>(t.row_labels.size());
    r.n_clusters_truth = static_cast<int>(t.col_labels.size());
    r.acc = accuracy(pred, truth);
    r.ri = rand_index(t);
    r.e_ri = expected_rand_index(t);
    r.ari = adjusted_rand_index(pred, truth);
    return r;
}

inline std::string format_metrics(const MetricsReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "acc=%.12g\nri=%.12g\ne_ri=%.12g\nari=%.12g\nm=%lld\n"
                  "n_clusters_pred=%d\nn_clusters_truth=%d\n",
                  r.acc, r.ri, r.e_ri, r.ari, static_cast<long long>(r.m),
                  r.n_clusters_pred, r.n_clusters_truth);
    return buf;
}

}  // namespace visclust

#endif  // VISCLUST_METRICS_HPP
