#include "relfit/rng.hpp"

#include <cmath>
#include <mutex>

namespace relfit {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t s = base;
    std::uint64_t mixed = splitmix64_next(s);
    s ^= stream + 0x9e3779b97f4a7c15ULL;
    mixed ^= splitmix64_next(s);
    s ^= index + 0x85ebca6b0ull;
    mixed ^= splitmix64_next(s);
    return mixed;
}

Rng make_rng(std::uint64_t seed) {
    return Rng(seed);
}

double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

// 256-layer ziggurat for exp(-x^2/2) (Marsaglia & Tsang construction).
// Layer i is the rectangle [0, X[i]] x [Y[i], Y[i+1]]; layer 0 is the base
// strip whose overhang beyond R stands in for the tail.
struct ZigguratTables {
    static constexpr int kLayers = 256;
    static constexpr double kR = 3.6541528853610088;
    double x[kLayers + 1];
    double y[kLayers + 1];

    ZigguratTables() {
        const double f_r = std::exp(-0.5 * kR * kR);
        // Per-layer area: R*f(R) plus the exact tail mass of exp(-x^2/2).
        const double tail = std::sqrt(M_PI / 2.0) * std::erfc(kR / std::sqrt(2.0));
        const double v = (kR * f_r + tail);
        x[0] = v / f_r;  // virtual base width (rectangle + tail)
        x[1] = kR;
        y[0] = 0.0;
        y[1] = f_r;
        for (int i = 2; i <= kLayers; ++i) {
            y[i] = y[i - 1] + v / x[i - 1];
            x[i] = (y[i] >= 1.0) ? 0.0 : std::sqrt(-2.0 * std::log(y[i]));
        }
        x[kLayers] = 0.0;
    }
};

const ZigguratTables& tables() {
    static const ZigguratTables t;
    return t;
}

double sample_tail(Rng& rng, bool negative) {
    // Marsaglia tail method for x > R.
    constexpr double r = ZigguratTables::kR;
    double x, yy;
    do {
        x = -std::log(uniform01(rng)) / r;
        yy = -std::log(uniform01(rng));
    } while (yy + yy < x * x);
    return negative ? -(r + x) : (r + x);
}

}  // namespace

double standard_normal(Rng& rng) {
    const ZigguratTables& t = tables();
    for (;;) {
        const std::uint64_t bits = rng();
        const int i = static_cast<int>(bits & 0xFF);
        const bool negative = (bits >> 8) & 1ULL;
        const double u = static_cast<double>(bits >> 9) * 0x1.0p-55;
        const double x = u * t.x[i];
        if (x < t.x[i + 1]) return negative ? -x : x;
        if (i == 0) return sample_tail(rng, negative);
        const double yy = t.y[i] + uniform01(rng) * (t.y[i + 1] - t.y[i]);
        if (yy < std::exp(-0.5 * x * x)) return negative ? -x : x;
    }
}

Matrix standard_normal_matrix(Rng& rng, Index n, Index d) {
    Matrix out(n, d);
    fill_standard_normal(rng, out);
    return out;
}

void fill_standard_normal(Rng& rng, Eigen::Ref<Matrix> out) {
    for (Index j = 0; j < out.cols(); ++j)
        for (Index i = 0; i < out.rows(); ++i) out(i, j) = standard_normal(rng);
}

}  // namespace relfit
