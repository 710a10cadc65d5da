// Built with relaxed floating point so that log/sin/cos vectorize.
#include <cmath>

#include "levydiv/simulate.hpp"

namespace levydiv::detail {

void fill_normals(std::uint64_t key, std::uint64_t ctr, double* z) {
    constexpr int H = kNormalChunk / 2;
    alignas(64) double r[H];
    alignas(64) double th[H];
#pragma omp simd
    for (int i = 0; i < H; ++i) {
        std::uint64_t c = ctr + 2 * static_cast<std::uint64_t>(i);
        std::uint64_t a = mix64(key + c * kGolden);
        std::uint64_t b = mix64(key + (c + 1) * kGolden);
        double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
        double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
        r[i] = std::sqrt(-2.0 * std::log(u1));
        th[i] = 6.283185307179586 * u2;
    }
    // separate loops: a fused sin/cos is not vectorized
#pragma omp simd
    for (int i = 0; i < H; ++i) z[i] = r[i] * std::cos(th[i]);
#pragma omp simd
    for (int i = 0; i < H; ++i) z[H + i] = r[i] * std::sin(th[i]);
}

}  // namespace levydiv::detail
