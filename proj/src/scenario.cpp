#include "swarmplan/scenario.hpp"

#include <random>

namespace swarmplan {

namespace {

std::vector<Eigen::VectorXd> sample_separated(int N, const Eigen::VectorXd& lo,
                                              const Eigen::VectorXd& hi,
                                              const ScaledGeometry& geom, std::mt19937_64& rng,
                                              int attempt_cap) {
    const int d = static_cast<int>(lo.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::VectorXd> points;
    points.reserve(static_cast<std::size_t>(N));
    int attempts = 0;
    while (static_cast<int>(points.size()) < N) {
        if (++attempts > attempt_cap)
            throw PackingFailure("could not place " + std::to_string(N) +
                                 " separated positions in the given space");
        Eigen::VectorXd p(d);
        for (int i = 0; i < d; ++i) p(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
        bool ok = true;
        for (const auto& q : points) {
            if (geom.scaled_distance(p, q) < geom.r_hat_min) {
                ok = false;
                break;
            }
        }
        if (ok) points.push_back(std::move(p));
    }
    return points;
}

}  // namespace

Scenario generate_scenario(int N, int M, const Eigen::VectorXd& space_min,
                           const Eigen::VectorXd& space_max, const ScaledGeometry& geom,
                           std::uint64_t seed, int state_dim) {
    if (N < 1 || M < 1) throw std::invalid_argument("generate_scenario: N and M must be >= 1");
    if (space_min.size() != geom.dim() || space_max.size() != geom.dim())
        throw std::invalid_argument("generate_scenario: space box dimension mismatch");
    if (((space_max - space_min).array() <= 0.0).any())
        throw std::invalid_argument("generate_scenario: empty space box");

    constexpr int kAttemptCap = 100000;
    std::mt19937_64 rng(seed);

    Scenario sc;
    sc.N = N;
    sc.M = M;
    sc.space_min = space_min;
    sc.space_max = space_max;
    sc.seed = seed;

    const auto initials = sample_separated(N, space_min, space_max, geom, rng, kAttemptCap);
    sc.targets = sample_separated(N, space_min, space_max, geom, rng, kAttemptCap);

    sc.initial_states.reserve(static_cast<std::size_t>(N));
    for (const auto& p : initials) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(state_dim);
        x.head(geom.dim()) = p;
        sc.initial_states.push_back(std::move(x));
    }
    return sc;
}

}  // namespace swarmplan
