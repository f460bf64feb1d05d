// Serial reference against OpenMP kernels. Prints one line per kernel:
// name, size, serial ms/call, parallel ms/call, speedup, max abs difference.

#include "treewave/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

using namespace treewave;

namespace {

double time_ms(const std::function<void()>& f, int reps) {
    f();
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / reps;
}

double max_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

void report(const char* name, std::size_t n, double ts, double tp, double diff) {
    std::printf("%-12s n=%-9zu serial %9.3f ms  omp %9.3f ms  speedup %5.2f  maxdiff %.1e\n", name, n, ts, tp, ts / tp,
                diff);
}

} // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 50;
    std::printf("threads %d\n", omp_get_max_threads());
    const auto g = Nonlinearity::cubic();

    for (std::size_t n : {std::size_t{1} << 12, std::size_t{1} << 16, std::size_t{1} << 20}) {
        std::vector<double> u(n), ds(n), dp(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = 0.5 * (1 + std::tanh((static_cast<double>(i) - n / 2.0) / 50.0));
        const kernels::LatticeCoupling c{0.7, 2.0, 0.75, &g};
        const kernels::Ghosts gh{0.0, 1.0};
        const double ts = time_ms([&] { kernels::lattice_rhs_serial(u, ds, c, gh); }, reps);
        const double tp = time_ms([&] { kernels::lattice_rhs(u, dp, c, gh); }, reps);
        report("lattice_rhs", n, ts, tp, max_diff(ds, dp));
    }

    for (int depth : {10, 16, 19}) {
        const KaryTree tree(2, depth);
        std::vector<double> u(tree.size()), ds(tree.size()), dp(tree.size());
        for (std::size_t v = 0; v < u.size(); ++v) u[v] = 1 / (1 + std::exp(-(tree.layer_of(v) - depth / 2.0)));
        const double ts = time_ms([&] { kernels::tree_rhs_serial(tree, u, ds, 0.5, 0.75, g); }, reps);
        const double tp = time_ms([&] { kernels::tree_rhs(tree, u, dp, 0.5, 0.75, g); }, reps);
        report("tree_rhs", tree.size(), ts, tp, max_diff(ds, dp));
    }
    return 0;
}
