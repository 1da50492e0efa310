#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "aggdiff/convolve.hpp"
#include "aggdiff/field_ops.hpp"
#include "aggdiff/kernel.hpp"
#include "test_oracles.hpp"

using namespace aggdiff;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double chemo_kprime(double x) { return x == 0.0 ? 0.0 : -(x > 0 ? 1.0 : -1.0) * 0.5 * std::exp(-std::abs(x)); }
}

TEST_CASE("zero kernel samples") {
    const Grid g = make_grid(5.0, 64);
    const Kernel k = sample_kernel(ZeroKernel{}, g);
    CHECK(k.total_integral == 0.0);
    CHECK(k.l1_norm == 0.0);
    for (double s : k.samples) REQUIRE(s == 0.0);
}

TEST_CASE("chemotaxis kernel discretization") {
    const Grid g = make_grid(20.0, 4096);
    const Kernel k = sample_kernel(ChemotaxisKernel{}, g);

    SECTION("A vanishes bitwise by antisymmetry") {
        CHECK(k.total_integral == 0.0);
        const int m = k.offset_count();
        for (int j = 1; j <= m; ++j) REQUIRE(k.at_offset(-j) == -k.at_offset(j));
        REQUIRE(k.at_offset(0) == 0.0);
    }

    SECTION("cell averages match high-resolution quadrature") {
        // spot-check a few offsets against a fine Gauss rule on the same cell
        for (int j : {1, 2, 7, 100, 2000}) {
            const double a = (j - 0.5) * g.dx, b = (j + 0.5) * g.dx;
            const double ref = oracle::integrate(chemo_kprime, a, b, 64) / g.dx;
            REQUIRE(k.at_offset(j) == Catch::Approx(ref).epsilon(1e-13));
        }
    }

    SECTION("discrete L1 norm agrees with the telescoping closed form") {
        // sum_j |cell integral| telescopes: l1 = e^{-dx/2} - e^{-(2L - dx/2)};
        // the center cell contributes nothing (odd integrand), which is why
        // the discrete norm sits ~dx/2 below the continuum value 1.
        const double expected = std::exp(-0.5 * g.dx) - std::exp(-(2.0 * g.half_width - 0.5 * g.dx));
        CHECK(k.l1_norm == Catch::Approx(expected).epsilon(1e-12));
        CHECK(std::abs(k.l1_norm - 1.0) < g.dx);

        // and against brute-force quadrature of |K'| cell by cell
        aggdiff::CompensatedSum s;
        const int m = k.offset_count();
        for (int j = -m; j <= m; ++j) {
            const double cell = oracle::integrate(chemo_kprime, (j - 0.5) * g.dx,
                                                  (j + 0.5) * g.dx, 8);
            s.add(std::abs(cell));
        }
        CHECK(k.l1_norm == Catch::Approx(s.value()).epsilon(1e-6));
    }
}

TEST_CASE("gaussian mollifier kernel has A = a sigma sqrt(2 pi)") {
    const Grid g = make_grid(20.0, 4096);
    const Kernel k = sample_kernel(GaussianMollifierKernel{1.0, 1.0}, g);
    CHECK(std::abs(k.total_integral - std::sqrt(2.0 * std::numbers::pi)) < 1e-8);
    CHECK(std::abs(k.l1_norm - k.total_integral) < 1e-14);  // positive kernel

    const Kernel k2 = sample_kernel(GaussianMollifierKernel{-0.3, 2.0}, g);
    CHECK(k2.total_integral == Catch::Approx(-0.3 * 2.0 * std::sqrt(2.0 * std::numbers::pi))
                                   .epsilon(1e-10));
}

TEST_CASE("odd gaussian kernel is exactly antisymmetric with zero integral") {
    const Grid g = make_grid(10.0, 512);
    const Kernel k = sample_kernel(OddGaussianKernel{0.8, 1.2}, g);
    CHECK(k.total_integral == 0.0);
    const int m = k.offset_count();
    for (int j = 1; j <= m; ++j) REQUIRE(k.at_offset(-j) == -k.at_offset(j));

    // cell averages against quadrature of a x exp(-x^2 / (2 sigma^2))
    for (int j : {1, 5, 50}) {
        const double ref = oracle::integrate(
                               [](double x) { return 0.8 * x * std::exp(-x * x / (2.0 * 1.44)); },
                               (j - 0.5) * g.dx, (j + 0.5) * g.dx, 64) /
                           g.dx;
        REQUIRE(k.at_offset(j) == Catch::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("tabulated kernel integrates its interpolant") {
    const Grid g = make_grid(2.0, 64);
    // triangle bump: K'(x) = max(0, 1 - |x|); exact cell averages are easy
    TabulatedKernel tab;
    for (double x = -1.5; x <= 1.5 + 1e-12; x += 0.01) {
        tab.x.push_back(x);
        tab.value.push_back(std::max(0.0, 1.0 - std::abs(x)));
    }
    const Kernel k = sample_kernel(tab, g);
    CHECK(k.total_integral == Catch::Approx(1.0).margin(2e-4));  // interpolant area
    for (int j : {0, 3, 10}) {
        const double ref = oracle::integrate(
                               [](double x) { return std::max(0.0, 1.0 - std::abs(x)); },
                               (j - 0.5) * g.dx, (j + 0.5) * g.dx, 64) /
                           g.dx;
        REQUIRE(k.at_offset(j) == Catch::Approx(ref).margin(2e-5));
    }
}

TEST_CASE("tabulated kernel rejects bad data") {
    const Grid g = make_grid(2.0, 16);
    TabulatedKernel nonfinite{{-1.0, 0.0, 1.0}, {0.0, std::nan(""), 0.0}};
    CHECK_THROWS_AS(sample_kernel(nonfinite, g), std::invalid_argument);
    TabulatedKernel unsorted{{-1.0, 1.0, 0.0}, {0.0, 1.0, 0.0}};
    CHECK_THROWS_AS(sample_kernel(unsorted, g), std::invalid_argument);
    TabulatedKernel tiny{{0.0}, {1.0}};
    CHECK_THROWS_AS(sample_kernel(tiny, g), std::invalid_argument);
}

TEST_CASE("kernel table parser") {
    std::istringstream in("# comment line\n-1.0  0.5\n0.0 1.0  # trailing\n\n1.0\t0.5\n");
    const TabulatedKernel t = load_kernel_table(in);
    REQUIRE(t.x.size() == 3);
    CHECK(t.x[1] == 0.0);
    CHECK(t.value[2] == 0.5);

    std::istringstream bad("0.0\n");
    CHECK_THROWS_AS(load_kernel_table(bad), std::invalid_argument);
}

TEST_CASE("tabulated smooth kernel approaches the closed form") {
    const Grid g = make_grid(4.0, 128);
    TabulatedKernel tab;
    for (int i = 0; i <= 9000; ++i) {
        const double x = -9.0 + i * 0.002;
        tab.x.push_back(x);
        tab.value.push_back(0.8 * x * std::exp(-x * x / (2.0 * 1.44)));
    }
    const Kernel approx = sample_kernel(tab, g);
    const Kernel exact = sample_kernel(OddGaussianKernel{0.8, 1.2}, g);
    double worst = 0.0;
    for (int j = -approx.offset_count(); j <= approx.offset_count(); ++j)
        worst = std::max(worst, std::abs(approx.at_offset(j) - exact.at_offset(j)));
    CHECK(worst < 1e-5);  // limited by the table resolution, O(h^2)
}

TEST_CASE("tabulated chemotaxis kernel matches away from the jump") {
    // the interpolant cannot represent the jump of K' at 0, so the center
    // cell is excluded; every other cell average converges
    const Grid g = make_grid(4.0, 128);
    TabulatedKernel tab;
    for (int i = 0; i <= 9000; ++i) {
        const double x = -9.0 + i * 0.002;
        tab.x.push_back(x);
        tab.value.push_back(chemo_kprime(x));
    }
    const Kernel approx = sample_kernel(tab, g);
    const Kernel exact = sample_kernel(ChemotaxisKernel{}, g);
    double worst = 0.0;
    for (int j = 1; j <= approx.offset_count(); ++j) {
        worst = std::max(worst, std::abs(approx.at_offset(j) - exact.at_offset(j)));
        worst = std::max(worst, std::abs(approx.at_offset(-j) - exact.at_offset(-j)));
    }
    CHECK(worst < 1e-5);
    CHECK(std::abs(approx.at_offset(0)) < 0.05);
}

TEST_CASE("chemotaxis potential kernel integrates to ~1") {
    const Grid g = make_grid(20.0, 2048);
    const Kernel k = chemotaxis_potential_kernel(g);
    const double expected = 1.0 - std::exp(-(2.0 * g.half_width - 0.5 * g.dx));
    CHECK(k.total_integral == Catch::Approx(expected).epsilon(1e-12));
    // even function: symmetric samples
    for (int j = 1; j <= 5; ++j) REQUIRE(k.at_offset(-j) == k.at_offset(j));
}

TEST_CASE("convolution trivial cases") {
    const Grid g = make_grid(5.0, 64);
    const Field u = gaussian_field(g, 1.0, 0.7);
    const Field zero_vel = convolve(sample_kernel(ZeroKernel{}, g), u);
    for (double v : zero_vel.values) REQUIRE(v == 0.0);

    const Kernel k = sample_kernel(ChemotaxisKernel{}, g);
    const Field nothing = convolve(k, Field(g));
    for (double v : nothing.values) REQUIRE(v == 0.0);

    const Grid other = make_grid(5.0, 128);
    CHECK_THROWS_AS(convolve(k, Field(other)), std::invalid_argument);
    CHECK_THROWS_AS(convolve_direct(k, Field(other)), std::invalid_argument);
}

TEST_CASE("FFT convolution equals direct summation") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int n : {8, 64, 1024}) {
        const Grid g = make_grid(6.0, n);
        for (const KernelSpec& spec :
             {KernelSpec{ChemotaxisKernel{}}, KernelSpec{GaussianMollifierKernel{0.9, 0.8}}}) {
            const Kernel k = sample_kernel(spec, g);
            Field u(g);
            for (auto& v : u.values) v = dist(rng);
            const Field fast = convolve(k, u);
            const Field slow = convolve_direct(k, u);
            const double scale = std::max(lp_norm(slow, kInf), 1e-300);
            REQUIRE(max_abs_diff(fast, slow) / scale < 1e-12);
        }
    }
}

TEST_CASE("FFT convolution of a Gaussian bump matches the oracle tightly") {
    const Grid g = make_grid(20.0, 4096);
    const Kernel k = sample_kernel(ChemotaxisKernel{}, g);
    const Field u = gaussian_field(g, 1.0, 1.0);
    const Field fast = convolve(k, u);
    const Field slow = convolve_direct(k, u);
    const double scale = lp_norm(slow, kInf);
    CHECK(max_abs_diff(fast, slow) / scale < 1e-12);
}

TEST_CASE("convolution is linear") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const Grid g = make_grid(4.0, 256);
    const Kernel k = sample_kernel(OddGaussianKernel{1.1, 0.6}, g);
    for (int rep = 0; rep < 10; ++rep) {
        Field u(g), w(g);
        for (auto& v : u.values) v = dist(rng);
        for (auto& v : w.values) v = dist(rng);
        const double a = dist(rng), b = dist(rng);
        const Field lhs = convolve(k, axpby(a, u, b, w));
        const Field rhs = axpby(a, convolve(k, u), b, convolve(k, w));
        const double scale = std::max({lp_norm(rhs, kInf), lp_norm(lhs, kInf), 1e-30});
        REQUIRE(max_abs_diff(lhs, rhs) / scale < 1e-12);
    }
}

TEST_CASE("even density with odd kernel gives an odd velocity") {
    const Grid g = make_grid(12.0, 1024);
    const Kernel k = sample_kernel(ChemotaxisKernel{}, g);
    const Field u = gaussian_field(g, 2.0, 1.5);
    const Field b = convolve(k, u);
    const double scale = lp_norm(b, kInf);
    for (int i = 0; i < g.n_cells / 2; ++i)
        REQUIRE(std::abs(b[i] + b[g.n_cells - 1 - i]) <= 1e-13 * scale);
}
