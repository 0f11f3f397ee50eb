// Copyright 2026 The FisherLens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference vs OpenMP kernels. Prints one line per kernel with the
// best-of-N wall time for each and whether the outputs were identical.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>

#include "fisherlens/cascade.hpp"
#include "fisherlens/dataset.hpp"
#include "fisherlens/kernels.hpp"
#include "fisherlens/netpbm.hpp"

using namespace fisherlens;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double best_ms(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    }
    return best;
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform();
    }
    return m;
}

void report(const char* name, double serial, double parallel, bool same) {
    std::printf("%-18s serial %9.2f ms  parallel %9.2f ms  speedup %5.2fx  %s\n", name, serial, parallel,
                serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::stoi(argv[1]) : 3;
    std::printf("threads: %d\n", kernels::max_threads());

    Rng rng(1);
    const Matrix x = random_matrix(rng, 400, 2304);  // 400 faces of 48x48
    Matrix g1, g2;
    const double gs = best_ms(reps, [&] { g1 = kernels::gram_serial(x); });
    const double gp = best_ms(reps, [&] { g2 = kernels::gram_parallel(x); });
    report("gram 400x2304", gs, gp, g1 == g2);

    const Matrix w = random_matrix(rng, 2304, 120);
    Matrix m1, m2;
    const double ms = best_ms(reps, [&] { m1 = kernels::multiply_serial(x, w); });
    const double mp = best_ms(reps, [&] { m2 = kernels::multiply_parallel(x, w); });
    report("multiply", ms, mp, m1 == m2);

    const Matrix pts = random_matrix(rng, 20000, 7);
    const Matrix probe = random_matrix(rng, 1, 7);
    std::vector<double> d1, d2;
    const double ds = best_ms(reps, [&] { d1 = kernels::squared_distances_serial(pts, probe.row(0)); });
    const double dp = best_ms(reps, [&] { d2 = kernels::squared_distances_parallel(pts, probe.row(0)); });
    report("distances 20000", ds, dp, d1 == d2);

    const std::string root = FISHERLENS_SOURCE_DIR;
    const CascadeModel model = load_cascade(root + "/data/cascades/haarcascade_frontalface_default.xml");
    const IntegralImage ii(netpbm::read_gray(root + "/tests/fixtures/portraits/hopper.pgm"));
    const ScaledCascade sc(model, 1.0);
    std::vector<Rect> r1, r2;
    const double ss = best_ms(reps, [&] { r1 = kernels::scan_windows_serial(sc, ii, 1); });
    const double sp = best_ms(reps, [&] { r2 = kernels::scan_windows_parallel(sc, ii, 1); });
    report("scan 256x300", ss, sp, r1 == r2);
    return 0;
}
