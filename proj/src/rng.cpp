#include "fmdp/rng.hpp"

namespace fmdp {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double CounterRng::uniform(std::initializer_list<std::uint64_t> key) const {
    std::uint64_t h = mix64(seed_);
    for (std::uint64_t k : key) h = mix64(h ^ mix64(k));
    // top 53 bits -> [0, 1)
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

bool CounterRng::bernoulli(double p, std::initializer_list<std::uint64_t> key) const {
    return uniform(key) < p;
}

int CounterRng::categorical(std::span<const double> row,
                            std::initializer_list<std::uint64_t> key) const {
    const double u = uniform(key);
    double cum = 0.0;
    for (size_t i = 0; i + 1 < row.size(); ++i) {
        cum += row[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(row.size()) - 1;
}

}  // namespace fmdp
