#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "mfglab/errors.hpp"
#include "mfglab/nplayer.hpp"

namespace mfglab::nplayer {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Uniform on [0, 1) from the top 53 bits; std::uniform_real_distribution is
// not specified bit-for-bit across standard libraries.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<int> simulate_one(const NPlayerValue& values, int m0, double eta, double bound, std::uint64_t seed) {
    const TimeGrid& grid = values.grid();
    const int players = values.N() + 1;
    std::vector<int> path(grid.size(), m0);
    if (bound <= 0.0) return path;

    std::mt19937_64 rng(seed);
    int m = m0;
    double t = 0.0;
    std::size_t next_node = 1;
    while (true) {
        t += -std::log1p(-uniform(rng)) / bound;
        while (next_node < grid.size() && grid.node(next_node) < t) path[next_node++] = m;
        if (next_node >= grid.size()) break;
        const double up = m < players ? (players - m) * (values.alpha_at(1, m, t) + eta) : 0.0;
        const double down = m > 0 ? m * (values.alpha_at(0, m - 1, t) + eta) : 0.0;
        const double w = uniform(rng) * bound;
        if (w < up) {
            ++m;
        } else if (w < up + down) {
            --m;
        }
    }
    return path;
}

}  // namespace

Trajectory SamplePathSet::path(int r) const {
    Trajectory out(grid, {"occupancy"});
    for (std::size_t k = 0; k < grid.size(); ++k) out(k, 0) = value(r, k);
    return out;
}

std::uint64_t replica_seed(std::uint64_t base_seed, int r) {
    return splitmix64(splitmix64(base_seed) ^ static_cast<std::uint64_t>(r));
}

SamplePathSet simulate_population(const NPlayerValue& values, int m0, const CostModel& model, std::uint64_t seed,
                                  int replicas, unsigned threads) {
    const int players = values.N() + 1;
    if (m0 < 0 || m0 > players) throw InvalidArgument("simulate_population: need 0 ≤ m0 ≤ N+1");
    if (replicas < 1) throw InvalidArgument("simulate_population: need at least one replica");
    const double eta = model.eta();
    const double bound = players * (values.max_alpha() + eta);

    SamplePathSet out{.players = players, .grid = values.grid(), .seed = seed,
                      .counts = std::vector<std::vector<int>>(static_cast<std::size_t>(replicas))};
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(replicas));

    auto work = [&](unsigned w) {
        for (int r = static_cast<int>(w); r < replicas; r += static_cast<int>(threads)) {
            out.counts[r] = simulate_one(values, m0, eta, bound, replica_seed(seed, r));
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    return out;
}

}  // namespace mfglab::nplayer
