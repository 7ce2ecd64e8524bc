// Quickstart: generate three separated blobs, cluster them without telling
// the algorithm where they are, compare against the generator's labels, and
// write the labeling plus a scatter plot alongside the binary.

#include <cstdio>
#include <visclust/dataset.hpp>
#include <visclust/metrics.hpp>
#include <visclust/plot.hpp>
#include <visclust/visclust.hpp>

int main() {
    using namespace visclust;

    Rng data_rng(7);
    const Dataset data = gen_blobs(/*m=*/300, /*d=*/3, /*n_c=*/3,
                                   /*stddev=*/0.06, data_rng);

    VisClustConfig cfg;
    cfg.n_c = 3;
    cfg.seed = 11;
    const Partition part = cluster(data, cfg);

    std::printf("status      : %s\n", status_name(part.status));
    std::printf("iterations  : %ld\n", static_cast<long>(part.iterations_used));
    std::printf("division    :");
    for (double f : part.division) std::printf(" %.3f", f);
    std::printf("\n");
    std::printf("agreement   : ari=%.4f acc=%.4f\n",
                adjusted_rand_index(part.labels, data.labels),
                accuracy(part.labels, data.labels));

    save_labels("quickstart_labels.txt", part.labels);
    write_scatter_svg("quickstart.svg", data.points.leftCols(2), part.labels);
    std::printf("wrote quickstart_labels.txt and quickstart.svg\n");
    return part.status == Status::satisfied ? 0 : 1;
}
