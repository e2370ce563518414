// Demo: marginal stability curves.
//
// Sweeps the cap curvature and prints, for each of the six highest-threshold
// modes, the feed value A at which that mode becomes marginal.  A mode is
// unstable where the feed sits below its curve, so the maximum over modes
// marks where the uniform state first loses stability; near gamma = 0.5 the
// five-lobed (5,1) mode owns it.
//
//   ./marginal_curves [samples]

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "slowcap/geometry.hpp"
#include "slowcap/kinetics.hpp"
#include "slowcap/specfun.hpp"

int main(int argc, char** argv) {
    using namespace slowcap;
    const int samples = argc > 1 ? std::atoi(argv[1]) : 11;
    const Kinetics kin{ModelParams{}};
    const std::vector<std::pair<int, int>> modes{{0, 3}, {1, 3}, {2, 2},
                                                 {3, 2}, {5, 1}, {6, 1}};

    std::printf("%-8s", "gamma");
    for (auto [m, n] : modes) std::printf("  A(%d,%d)   ", m, n);
    std::printf("\n");
    for (int i = 0; i < samples; ++i) {
        const double g = 0.44 + (0.56 - 0.44) * i / (samples - 1);
        std::printf("%-8.4f", g);
        for (auto [m, n] : modes) {
            const double lambda = boundary_degree(m, n, g);
            const double mu     = cap_eigenvalue(lambda, g, kin.p.radius);
            if (const auto A = kin.marginal_A(mu))
                std::printf("  %9.4f", *A);
            else
                std::printf("  %9s", "-");
        }
        std::printf("\n");
    }
    return 0;
}
