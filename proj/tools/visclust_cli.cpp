// Command-line front end: cluster datasets, evaluate label files, generate
// synthetic data, run benchmark sweeps, and render scatter plots.
//
// Exit codes: 0 success, 1 the algorithm could not satisfy the requested
// division, 2 usage or input error.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <visclust/dataset.hpp>
#include <visclust/kmeans.hpp>
#include <visclust/metrics.hpp>
#include <visclust/plot.hpp>
#include <visclust/visclust.hpp>

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitNotSatisfied = 1;
constexpr int kExitUsage = 2;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("VISCLUST_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return static_cast<std::uint64_t>(v);
        std::fprintf(stderr, "warning: ignoring non-numeric VISCLUST_SEED='%s'\n", env);
    }
    return 42;
}

std::vector<double> parse_division(const std::string& text, int n_c) {
    std::vector<double> div;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string cell =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (!end || *end != '\0' || cell.empty())
            throw CLI::ValidationError("--division", "cannot parse '" + cell + "' as a number");
        div.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (n_c > 0 && static_cast<int>(div.size()) != n_c)
        throw CLI::ValidationError(
            "--division", "expected " + std::to_string(n_c) + " entries, got " +
                              std::to_string(div.size()));
    double sum = 0.0;
    for (double v : div) {
        if (v < 0) throw CLI::ValidationError("--division", "entries must be nonnegative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw CLI::ValidationError("--division", "entries must sum to 1 (got " +
                                                     std::to_string(sum) + ")");
    for (double& v : div) v /= sum;  // exact renormalization after the 1e-6 gate
    return div;
}

visclust::LoadOptions label_options(const std::string& truth_column) {
    visclust::LoadOptions opt;
    if (truth_column.empty()) return opt;
    char* end = nullptr;
    const long idx = std::strtol(truth_column.c_str(), &end, 10);
    if (end && *end == '\0')
        opt.label_index = static_cast<int>(idx);
    else
        opt.label_name = truth_column;
    return opt;
}

Eigen::MatrixXd plot_coordinates(const visclust::Dataset& x) {
    Eigen::MatrixXd xy(x.size(), 2);
    xy.col(0) = x.points.col(0);
    if (x.dim() >= 2)
        xy.col(1) = x.points.col(1);
    else
        xy.col(1).setZero();
    return xy;
}

void print_metrics(const visclust::MetricsReport& r) {
    std::fputs(visclust::format_metrics(r).c_str(), stdout);
}

struct ClusterArgs {
    std::string input;
    int n_c = 0;
    double threshold = 0.1;
    double scale = 1.25;
    int subsample = 0;
    std::string division;
    std::uint64_t seed = 42;
    bool seed_given = false;
    std::string embedding_path;
    std::string algo = "visclust";
    std::string plot_path;
    std::string output_path;
    std::string truth_column;
};

int run_cluster(const ClusterArgs& a) {
    using namespace visclust;
    Dataset x = load_delimited(a.input, label_options(a.truth_column));

    VisClustConfig cfg;
    cfg.n_c = a.n_c;
    cfg.t = a.threshold;
    cfg.s = a.scale;
    cfg.u = a.subsample;
    cfg.seed = a.seed;
    if (!a.division.empty()) {
        if (a.n_c <= 0)
            throw CLI::ValidationError("--division", "requires --clusters");
        cfg.division = parse_division(a.division, a.n_c);
    }
    if (!a.embedding_path.empty()) {
        const Dataset emb = load_delimited(a.embedding_path, LoadOptions{});
        cfg.embedding = emb.points;
    }

    const std::string out_path =
        a.output_path.empty() ? a.input + ".labels" : a.output_path;

    std::vector<int> labels;
    const char* status = nullptr;
    std::int64_t iterations = 0;
    int k_used = 0;
    int n_c_effective = a.n_c;
    double final_s = 0.0;
    int exit_code = kExitSuccess;

    const auto t0 = std::chrono::steady_clock::now();
    if (a.algo == "kmeans") {
        if (a.n_c <= 0)
            throw CLI::ValidationError("--algo", "kmeans requires --clusters");
        Rng rng(a.seed);
        KMeansResult km = kmeans(x.points, a.n_c, rng);
        labels = km.labels;
        status = "satisfied";
        iterations = km.iterations;
        final_s = 0.0;
    } else if (a.algo == "visclust") {
        Partition p = a.n_c > 0 ? cluster(x, cfg) : auto_cluster_count(x, cfg);
        labels = std::move(p.labels);
        status = status_name(p.status);
        iterations = p.iterations_used;
        k_used = p.k_used;
        n_c_effective = static_cast<int>(p.division.size());
        final_s = p.final_s;
        if (!p.division_met()) exit_code = kExitNotSatisfied;
    } else {
        throw CLI::ValidationError("--algo", "unknown algorithm '" + a.algo + "'");
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    save_labels(out_path, labels);
    if (!a.plot_path.empty())
        write_scatter_svg(a.plot_path, plot_coordinates(x), labels);

    std::printf("status=%s\n", status);
    std::printf("iterations_used=%lld\n", static_cast<long long>(iterations));
    std::printf("k_used=%d\n", k_used);
    std::printf("final_s=%.12g\n", final_s);
    std::printf("wall_time_seconds=%.6f\n", wall);
    std::printf("seed=%llu\n", static_cast<unsigned long long>(a.seed));
    std::printf("algo=%s\n", a.algo.c_str());
    std::printf("input=%s\n", a.input.c_str());
    std::printf("clusters=%d\n", n_c_effective);
    std::printf("threshold=%.12g\n", a.threshold);
    std::printf("scale=%.12g\n", a.scale);
    std::printf("subsample=%d\n", a.subsample == 0 ? static_cast<int>(x.size()) : a.subsample);
    {
        std::string div = "uniform";
        if (!cfg.division.empty()) {
            div.clear();
            char buf[32];
            for (std::size_t i = 0; i < cfg.division.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.12g", cfg.division[i]);
                if (i) div += ',';
                div += buf;
            }
        }
        std::printf("division=%s\n", div.c_str());
    }
    if (!a.embedding_path.empty()) std::printf("embedding=%s\n", a.embedding_path.c_str());
    std::printf("labels_file=%s\n", out_path.c_str());

    if (x.has_labels()) print_metrics(evaluate_labels(labels, x.labels));
    return exit_code;
}

int run_eval(const std::string& pred_path, const std::string& truth_path) {
    using namespace visclust;
    const std::vector<int> pred = load_labels(pred_path);
    const std::vector<int> truth = load_labels(truth_path);
    if (pred.size() != truth.size()) {
        std::fprintf(stderr, "error: label files differ in length (%zu vs %zu)\n",
                     pred.size(), truth.size());
        return kExitUsage;
    }
    print_metrics(evaluate_labels(pred, truth));
    return kExitSuccess;
}

struct SynthArgs {
    std::string family;
    std::string out_path;
    int points = 1000;
    int dims = 2;
    int clusters = 4;
    double stddev = 0.05;
    double noise = 0.02;
    std::uint64_t seed = 42;
};

int run_synth(const SynthArgs& a) {
    using namespace visclust;
    Rng rng(a.seed);
    Dataset x;
    if (a.family == "blobs") {
        x = gen_blobs(a.points, a.dims, a.clusters, a.stddev, rng);
    } else if (a.family == "circles") {
        if (a.dims != 2) throw CLI::ValidationError("--dims", "circles are 2-D");
        x = gen_circles(a.points, a.noise, rng);
    } else if (a.family == "moons") {
        if (a.dims != 2) throw CLI::ValidationError("--dims", "moons are 2-D");
        x = gen_moons(a.points, a.noise, rng);
    } else if (a.family == "gaussian") {
        x = gen_single_gaussian(a.points, a.dims, a.stddev, rng);
    } else {
        throw CLI::ValidationError(
            "family", "expected blobs|circles|moons|gaussian, got '" + a.family + "'");
    }
    save_dataset(a.out_path, x);
    std::printf("file=%s\nrows=%lld\ndims=%lld\nclasses=%d\nseed=%llu\n", a.out_path.c_str(),
                static_cast<long long>(x.size()), static_cast<long long>(x.dim()),
                x.has_labels() ? *std::max_element(x.labels.begin(), x.labels.end()) : 0,
                static_cast<unsigned long long>(a.seed));
    return kExitSuccess;
}

struct BenchArgs {
    std::vector<int> m_list{1000};
    std::vector<int> d_list{5};
    std::vector<int> k_list{4};
    int repeats = 5;
    std::vector<std::string> algos{"visclust"};
    double stddev = 0.05;
    std::uint64_t seed = 42;
    bool aggregate = false;
};

int run_bench(const BenchArgs& a) {
    using namespace visclust;
    struct Key {
        std::string algo;
        int m, d, k;
        bool operator<(const Key& o) const {
            return std::tie(algo, m, d, k) < std::tie(o.algo, o.m, o.d, o.k);
        }
    };
    std::map<Key, std::vector<std::pair<double, double>>> agg;  // (wall, ari)

    for (int m : a.m_list)
        for (int d : a.d_list)
            for (int k : a.k_list)
                for (int rep = 0; rep < a.repeats; ++rep) {
                    const std::uint64_t run_seed =
                        derive_seed(a.seed, 0xb36c4u,
                                    static_cast<std::uint64_t>(rep) * 1000003u +
                                        static_cast<std::uint64_t>(m) +
                                        static_cast<std::uint64_t>(d) * 131u +
                                        static_cast<std::uint64_t>(k) * 17u);
                    Rng gen(run_seed);
                    const Dataset x = gen_blobs(m, d, k, a.stddev, gen);
                    for (const std::string& algo : a.algos) {
                        std::vector<int> labels;
                        const auto t0 = std::chrono::steady_clock::now();
                        if (algo == "kmeans") {
                            Rng rng(run_seed + 1);
                            labels = kmeans(x.points, k, rng).labels;
                        } else if (algo == "visclust") {
                            VisClustConfig cfg;
                            cfg.n_c = k;
                            cfg.seed = run_seed + 1;
                            labels = cluster(x, cfg).labels;
                        } else {
                            throw CLI::ValidationError(
                                "--algos", "unknown algorithm '" + algo + "'");
                        }
                        const double wall = std::chrono::duration<double>(
                                                std::chrono::steady_clock::now() - t0)
                                                .count();
                        const MetricsReport r = evaluate_labels(labels, x.labels);
                        std::printf(
                            "algo=%s m=%d d=%d n_c=%d repeat=%d seed=%llu "
                            "wall_time_seconds=%.6f ari=%.12g\n",
                            algo.c_str(), m, d, k, rep,
                            static_cast<unsigned long long>(run_seed), wall, r.ari);
                        agg[Key{algo, m, d, k}].emplace_back(wall, r.ari);
                    }
                }

    if (a.aggregate) {
        for (const auto& [key, rows] : agg) {
            double wm = 0, am = 0;
            for (const auto& [w, ari] : rows) {
                wm += w;
                am += ari;
            }
            wm /= static_cast<double>(rows.size());
            am /= static_cast<double>(rows.size());
            double wv = 0, av = 0;
            for (const auto& [w, ari] : rows) {
                wv += (w - wm) * (w - wm);
                av += (ari - am) * (ari - am);
            }
            const double denom = rows.size() > 1 ? static_cast<double>(rows.size() - 1) : 1.0;
            std::printf(
                "aggregate algo=%s m=%d d=%d n_c=%d repeats=%zu wall_mean=%.6f "
                "wall_std=%.6f ari_mean=%.12g ari_std=%.12g\n",
                key.algo.c_str(), key.m, key.d, key.k, rows.size(), wm,
                std::sqrt(wv / denom), am, std::sqrt(av / denom));
        }
    }
    return kExitSuccess;
}

struct PlotArgs {
    std::string input;
    std::string labels_path;
    std::string out_path;
    std::string projection = "first2";
    std::string embedding_path;
    std::string truth_column;
    std::uint64_t seed = 42;
};

int run_plot(const PlotArgs& a) {
    using namespace visclust;
    const Dataset x = load_delimited(a.input, label_options(a.truth_column));
    std::vector<int> labels;
    try {
        labels = load_labels(a.labels_path);
    } catch (const InsufficientDataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    if (static_cast<Eigen::Index>(labels.size()) != x.size()) {
        std::fprintf(stderr, "error: %zu labels for %lld points\n", labels.size(),
                     static_cast<long long>(x.size()));
        return kExitUsage;
    }
    Eigen::MatrixXd xy;
    if (a.projection == "first2") {
        xy = plot_coordinates(x);
    } else if (a.projection == "seeded-random") {
        Rng rng(a.seed);
        const ProjectionBasis q =
            sample_stiefel(2, std::max<int>(2, static_cast<int>(x.dim())), rng);
        Eigen::MatrixXd pts = x.points;
        if (pts.cols() == 1) {
            pts.conservativeResize(Eigen::NoChange, 2);
            pts.col(1).setZero();
        }
        xy = project(q, pts);
    } else if (a.projection == "embedding") {
        if (a.embedding_path.empty())
            throw CLI::ValidationError("--projection", "embedding mode needs --embedding");
        const Dataset emb = load_delimited(a.embedding_path, LoadOptions{});
        if (emb.size() != x.size()) {
            std::fprintf(stderr, "error: embedding rows do not match points\n");
            return kExitUsage;
        }
        xy = emb.points.leftCols(2);
    } else {
        throw CLI::ValidationError(
            "--projection", "expected first2|seeded-random|embedding, got '" +
                                a.projection + "'");
    }
    write_scatter_svg(a.out_path, xy, labels);
    std::printf("plot=%s\n", a.out_path.c_str());
    return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Projection-image clustering tool"};
    app.require_subcommand(1);

    const std::uint64_t env_seed = default_seed();

    ClusterArgs ca;
    ca.seed = env_seed;
    CLI::App* cl = app.add_subcommand("cluster", "Cluster a delimited dataset");
    cl->add_option("input", ca.input, "input file (CSV/TSV)")->required();
    cl->add_option("-n,--clusters", ca.n_c, "number of clusters (omit to infer)");
    cl->add_option("-t,--threshold", ca.threshold, "division acceptance threshold")
        ->capture_default_str();
    cl->add_option("-s,--scale", ca.scale, "filter scale factor")->capture_default_str();
    cl->add_option("-u,--subsample", ca.subsample, "points used per run (0 = all)")
        ->capture_default_str();
    cl->add_option("--division", ca.division, "target cluster fractions, comma-separated");
    cl->add_option("--seed", ca.seed, "random seed (default: $VISCLUST_SEED or 42)");
    cl->add_option("--embedding", ca.embedding_path,
                   "precomputed 2-D/3-D embedding file used instead of projections");
    cl->add_option("--algo", ca.algo, "visclust or kmeans (baseline, 10 restarts)")
        ->capture_default_str();
    cl->add_option("--plot", ca.plot_path, "write an SVG scatter of the first two axes");
    cl->add_option("-o,--output", ca.output_path, "labels output path (default: input + .labels)");
    cl->add_option("--truth-column", ca.truth_column,
                   "label column (name or 0-based index) used for metrics");

    std::string ev_pred, ev_truth;
    CLI::App* ev = app.add_subcommand("eval", "Compare two label files");
    ev->add_option("predicted", ev_pred, "predicted labels, one per line")->required();
    ev->add_option("truth", ev_truth, "ground-truth labels, one per line")->required();

    SynthArgs sa;
    sa.seed = env_seed;
    CLI::App* sy = app.add_subcommand("synth", "Generate a synthetic dataset");
    sy->add_option("family", sa.family, "blobs|circles|moons|gaussian")->required();
    sy->add_option("output", sa.out_path, "output CSV path")->required();
    sy->add_option("-m,--points", sa.points, "number of points")->capture_default_str();
    sy->add_option("-d,--dims", sa.dims, "dimensions")->capture_default_str();
    sy->add_option("-c,--clusters", sa.clusters, "clusters (blobs)")->capture_default_str();
    sy->add_option("--std", sa.stddev, "per-cluster standard deviation")
        ->capture_default_str();
    sy->add_option("--noise", sa.noise, "noise level (circles/moons)")->capture_default_str();
    sy->add_option("--seed", sa.seed, "random seed (default: $VISCLUST_SEED or 42)");

    BenchArgs ba;
    ba.seed = env_seed;
    CLI::App* be = app.add_subcommand("bench", "Benchmark sweep over generated blobs");
    be->add_option("--m-list", ba.m_list, "point counts")->delimiter(',');
    be->add_option("--d-list", ba.d_list, "dimension counts")->delimiter(',');
    be->add_option("--k-list", ba.k_list, "cluster counts")->delimiter(',');
    be->add_option("--repeats", ba.repeats, "repeats per configuration")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    be->add_option("--algos", ba.algos, "algorithms: visclust,kmeans")->delimiter(',');
    be->add_option("--std", ba.stddev, "blob standard deviation")->capture_default_str();
    be->add_option("--seed", ba.seed, "base seed (default: $VISCLUST_SEED or 42)");
    be->add_flag("--aggregate", ba.aggregate, "append mean/std per configuration");

    PlotArgs pa;
    pa.seed = env_seed;
    CLI::App* pl = app.add_subcommand("plot", "Render labeled points to an SVG scatter");
    pl->add_option("input", pa.input, "points file")->required();
    pl->add_option("labels", pa.labels_path, "labels file, one per line")->required();
    pl->add_option("output", pa.out_path, "SVG output path")->required();
    pl->add_option("--projection", pa.projection, "first2|seeded-random|embedding")
        ->capture_default_str();
    pl->add_option("--embedding", pa.embedding_path, "embedding file for --projection embedding");
    pl->add_option("--truth-column", pa.truth_column,
                   "label column of the input to exclude from coordinates");
    pl->add_option("--seed", pa.seed, "seed for seeded-random projection");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (cl->parsed()) return run_cluster(ca);
        if (ev->parsed()) return run_eval(ev_pred, ev_truth);
        if (sy->parsed()) return run_synth(sa);
        if (be->parsed()) return run_bench(ba);
        if (pl->parsed()) return run_plot(pa);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const visclust::InfeasibleError& e) {
        std::printf("status=error\nerror=%s\n", e.what());
        return kExitNotSatisfied;
    } catch (const visclust::NoStructureError& e) {
        std::printf("status=error\nerror=%s\n", e.what());
        return kExitNotSatisfied;
    } catch (const visclust::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
