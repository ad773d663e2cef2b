#pragma once

#include <optional>
#include <string>

#include "swarmplan/constraints.hpp"
#include "swarmplan/history.hpp"

namespace swarmplan {

struct SeparationViolationSite {
    std::int64_t round = 0;
    int uav_i = 0, uav_j = 0;
    Ticks time = 0;
    double distance = 0.0;
};

struct SeparationReport {
    double min_scaled_distance_at_samples = 0.0;
    double min_scaled_distance_dense = 0.0;
    int sample_violations = 0;
    int dense_violations = 0;
    bool guarantee_configured = false;   // r_hat_min - 2*delta_p_max >= r_min held
    double delta_p_max = 0.0;
    std::optional<SeparationViolationSite> first_violation;

    bool clean() const { return sample_violations == 0 && dense_violations == 0; }
};

struct FeasibilityBreach {
    std::int64_t round = 0;
    int uav = 0;
    double violation = 0.0;
    std::string family;
};

struct TheoremOneReport {
    int checked = 0;
    int breaches = 0;
    int infeasible_solves = 0;
    double max_violation = 0.0;
    std::optional<FeasibilityBreach> first_breach;
};

/// Upper bound on the Theta-scaled position displacement over [0, horizon_s]
/// under box-feasible states and inputs. Closed form (certified) for
/// per-axis integrator chains; corner/grid enumeration with a 5% margin
/// otherwise.
double delta_p_max(const LinearModel& model, const ScaledGeometry& geom, double horizon_s,
                   bool* certified = nullptr);

/// Sample-point separation over the whole history: for every committed
/// round, every pair and every h on the Tc grid, the scaled distance must be
/// >= r_hat_min - 1e-6.
SeparationReport check_lemma1(const RunHistory& history, const ScaledGeometry& geom,
                              const TimingConfig& timing);

/// Dense continuous-time separation over the executed timeline on the
/// base-step grid, plus the sample-to-dense inflation inequality.
SeparationReport check_theorem2(const RunHistory& history, const LinearModel& model,
                                const ScaledGeometry& geom, const TimingConfig& timing);

/// Recursive feasibility: re-assembles every replanned UAV's QP and checks
/// that the shifted previous plan is a feasible point (<= 1e-9).
TheoremOneReport check_theorem1(const RunHistory& history, const LinearModel& model,
                                const TimingConfig& timing, const ScaledGeometry& geom,
                                const CostWeights& weights,
                                const std::vector<Eigen::VectorXd>& targets);

}  // namespace swarmplan
