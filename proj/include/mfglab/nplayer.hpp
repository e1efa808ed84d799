#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfglab/grid_ode.hpp"
#include "mfglab/mfg.hpp"
#include "mfglab/model.hpp"

namespace mfglab::nplayer {

/// Cost-to-go u(i,n,t) of the reference player in the N+1 player game, where
/// n counts the other players in state 0, and the policy α*(i,n,t).
class NPlayerValue {
public:
    NPlayerValue(int others, TimeGrid grid);

    int N() const noexcept { return others_; }
    const TimeGrid& grid() const noexcept { return grid_; }

    double u(int i, int n, std::size_t k) const { return u_[index(i, n, k)]; }
    double& u(int i, int n, std::size_t k) { return u_[index(i, n, k)]; }
    double alpha(int i, int n, std::size_t k) const { return alpha_[index(i, n, k)]; }

    /// Y(n, t_k) = u(1,n,t_k) − u(0,n,t_k).
    double difference(int n, std::size_t k) const { return u(1, n, k) - u(0, n, k); }

    /// Largest entry of the policy table.
    double max_alpha() const;

    /// Fills α* = (u(i,n,t) − u(1−i,n,t))₊ from the stored values.
    void refresh_policy();

    /// α*(i, n, t) linearly interpolated in t.
    double alpha_at(int i, int n, double t) const;

private:
    std::size_t index(int i, int n, std::size_t k) const {
        return (k * 2 + static_cast<std::size_t>(i)) * static_cast<std::size_t>(others_ + 1) +
               static_cast<std::size_t>(n);
    }

    int others_;
    TimeGrid grid_;
    std::vector<double> u_;
    std::vector<double> alpha_;
};

/// Symmetric Markov-perfect equilibrium: backward RK4 of the 2(N+1)
/// dimensional HJB system with β = α* substituted inside every stage.
/// f and ψ are evaluated at θ = n/N.
NPlayerValue solve_symmetric_mpe(const CostModel& model, int N, const TimeGrid& grid);

/// Law of the number m ∈ {0..N+1} of players in state 0.
struct OccupancyDistribution {
    int players = 0;  ///< N + 1
    TimeGrid grid;
    std::vector<double> p;  ///< p[k * (players + 1) + m]

    double prob(std::size_t k, int m) const { return p[k * static_cast<std::size_t>(players + 1) + m]; }
    /// Mean of m/(N+1) at node k.
    double mean(std::size_t k) const;
    /// Variance of m/(N+1) at node k.
    double variance(std::size_t k) const;
    Trajectory mean_trajectory() const;
    Trajectory variance_trajectory() const;
};

/// Point mass at m0 players in state 0, over {0..N+1}.
std::vector<double> point_mass(int N, int m0);

/// Forward master equation with m → m+1 at (N+1−m)(α*(1,m,t)+η) and
/// m → m−1 at m(α*(0,m−1,t)+η).
OccupancyDistribution forward_occupancy(const NPlayerValue& values, std::span<const double> initial,
                                        const CostModel& model);

/// Sampled occupancy paths m(t)/(N+1), one row per replica.
struct SamplePathSet {
    int players = 0;
    TimeGrid grid;
    std::uint64_t seed = 0;
    std::vector<std::vector<int>> counts;  ///< counts[r][k] = m(t_k)

    int replicas() const noexcept { return static_cast<int>(counts.size()); }
    double value(int r, std::size_t k) const { return static_cast<double>(counts[r][k]) / players; }
    Trajectory path(int r) const;
};

/// Seed of replica r; depends only on (base_seed, r).
std::uint64_t replica_seed(std::uint64_t base_seed, int r);

/// Exact event simulation of the occupancy chain by thinning against
/// (N+1)(Γ₁ + η), Γ₁ = max α*. Replicas run on up to `threads` workers
/// (0 = hardware concurrency); output does not depend on the thread count.
SamplePathSet simulate_population(const NPlayerValue& values, int m0, const CostModel& model, std::uint64_t seed,
                                  int replicas, unsigned threads = 0);

struct GapReport {
    double epsilon = 0.0;             ///< cost_decentralized − cost_best_response
    double cost_decentralized = 0.0;  ///< all N+1 players follow the MFG policy
    double cost_best_response = 0.0;  ///< reference player best-responds to it
};

/// ε-Nash gap of the decentralized policy of `equilibrium` in the N+1 player
/// game, averaged over a reference player in state 0 with probability θ₀ and
/// Binomial(N, θ₀) other players in state 0.
GapReport best_response_gap(const CostModel& model, int N, const TimeGrid& grid, const mfg::MfgSolution& equilibrium,
                            double theta0);

struct FlmpReport {
    std::vector<int> nearest;                    ///< per path
    std::vector<double> nearest_distance;        ///< per path
    std::vector<std::vector<double>> distances;  ///< [path][candidate]
    std::vector<int> histogram;                  ///< paths per candidate
};

/// Sup-norm distance of each path to each candidate θ; candidates on a
/// different grid with the same horizon are interpolated onto the path grid.
FlmpReport flmp_distance(const std::vector<Trajectory>& paths, const std::vector<Trajectory>& candidates);
FlmpReport flmp_distance(const SamplePathSet& paths, const std::vector<Trajectory>& candidates);

/// Per node, the fractional n where n ↦ Y(n,t) crosses zero from below.
/// Values with |Y| ≤ dead_band count as zero.
std::vector<std::vector<double>> indifference_curve(const NPlayerValue& values, double dead_band = 1e-12);

/// Y(n, t) over n ∈ {0..N} and the nodes of `grid`.
class YTable {
public:
    YTable(int N, TimeGrid grid);
    int N() const noexcept { return others_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    double operator()(int n, std::size_t k) const { return v_[k * static_cast<std::size_t>(others_ + 1) + n]; }
    double& operator()(int n, std::size_t k) { return v_[k * static_cast<std::size_t>(others_ + 1) + n]; }
    /// Linear interpolation in n at node k, for n ∈ [0, N].
    double at_fraction(double n, std::size_t k) const;

private:
    int others_;
    TimeGrid grid_;
    std::vector<double> v_;
};

YTable difference_table(const NPlayerValue& values);

struct YApproxReport {
    YTable approx;
    YTable exact;
    double sup_error = 0.0;
};

/// Backward RK4 of the closed (N+1)-dimensional approximation for Y and its
/// sup-distance to the exact MPE difference.
YApproxReport solve_Y_approx(const CostModel& model, int N, const TimeGrid& grid);

/// The approximation alone.
YTable solve_Y_approx_table(const CostModel& model, int N, const TimeGrid& grid);

}  // namespace mfglab::nplayer
