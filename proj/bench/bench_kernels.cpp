// Timing comparison of the serial reference kernels against the OpenMP
// flavors, and a consistency check that both produce identical bytes.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "trom/kernels.hpp"

using trom::Index;
namespace k = trom::kernels;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count() / reps;
}

bool same_bytes(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

}  // namespace

int main() {
    const Index n = 192, t = 160, p = 48, r = 40;
    std::mt19937_64 rng(7);
    auto fill = [&](std::vector<double>& v) {
        for (double& x : v) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    };

    std::vector<double> x(static_cast<size_t>(n * t * p)), a(static_cast<size_t>(r * n));
    fill(x);
    fill(a);
    std::vector<double> out_serial(static_cast<size_t>(r * t * p));
    std::vector<double> out_omp(out_serial.size());
    std::vector<double> unf_serial(static_cast<size_t>(n * t * p)), unf_omp(unf_serial.size());

#if defined(_OPENMP)
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif
    std::printf("%-24s %12s %12s %8s\n", "kernel", "serial [ms]", "omp [ms]", "speedup");

    struct Case {
        const char* name;
        std::function<void()> serial;
        std::function<void()> omp;
        std::function<bool()> check;
    };
    const Case cases[] = {
        {"mode1_product",
         [&] { k::mode_product_serial(x.data(), n, t, p, 1, a.data(), r, out_serial.data()); },
         [&] { k::mode_product_omp(x.data(), n, t, p, 1, a.data(), r, out_omp.data()); },
         [&] { return same_bytes(out_serial, out_omp); }},
        {"unfold2",
         [&] { k::unfold2_serial(x.data(), n, t, p, unf_serial.data()); },
         [&] { k::unfold2_omp(x.data(), n, t, p, unf_omp.data()); },
         [&] { return same_bytes(unf_serial, unf_omp); }},
        {"unfold3",
         [&] { k::unfold3_serial(x.data(), n, t, p, unf_serial.data()); },
         [&] { k::unfold3_omp(x.data(), n, t, p, unf_omp.data()); },
         [&] { return same_bytes(unf_serial, unf_omp); }},
        {"sumsq",
         [&] { volatile double s = k::sumsq_serial(x.data(), n, t, p); (void)s; },
         [&] { volatile double s = k::sumsq_omp(x.data(), n, t, p); (void)s; },
         [&] { return k::sumsq_serial(x.data(), n, t, p) == k::sumsq_omp(x.data(), n, t, p); }},
    };

    bool all_match = true;
    for (const Case& c : cases) {
        const double ts = seconds(c.serial, 5);
        const double to = seconds(c.omp, 5);
        const bool match = c.check();
        all_match = all_match && match;
        std::printf("%-24s %12.3f %12.3f %7.2fx %s\n", c.name, 1e3 * ts, 1e3 * to, ts / to,
                    match ? "" : "MISMATCH");
    }
    return all_match ? 0 : 1;
}
