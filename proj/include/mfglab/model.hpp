#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mfglab {

enum class CostFamily { follow, avoid, prisoners_dilemma, zero, tabulated };

std::string_view to_string(CostFamily family);
CostFamily parse_cost_family(std::string_view name);

/// Per-state values on a θ-grid, evaluated by piecewise-linear interpolation.
struct CostTable {
    std::vector<double> theta;
    std::array<std::vector<double>, 2> values;

    double eval(int state, double theta) const;
    void validate(std::string_view what) const;
};

/// A two-state game: running cost f(i, θ), terminal cost ψ(i, θ), background
/// jump rate η and horizon T. Immutable after construction.
class CostModel {
public:
    static CostModel follow(double eta, double horizon, std::array<double, 2> terminal = {0.0, 0.0});
    static CostModel avoid(double eta, double horizon, std::array<double, 2> terminal = {0.0, 0.0});
    static CostModel prisoners_dilemma(double eta, double horizon, std::array<double, 2> terminal = {0.0, 0.0});
    static CostModel zero(double eta, double horizon);

    /// Running cost from a table. The terminal cost is either a pair of
    /// per-state constants or a second table. When `lipschitz` is omitted the
    /// declared constant is the steepest table slope.
    static CostModel tabulated(double eta, double horizon, CostTable running,
                               std::array<double, 2> terminal_constants = {0.0, 0.0},
                               std::optional<CostTable> terminal_table = std::nullopt,
                               std::optional<double> lipschitz = std::nullopt);

    /// Parses {"family", "params", "eta", "horizon"}; unknown keys are rejected.
    static CostModel from_json(const nlohmann::json& descriptor);
    nlohmann::json to_json() const;

    CostModel with_eta(double eta) const;
    CostModel with_horizon(double horizon) const;

    CostFamily family() const noexcept { return family_; }
    double eta() const noexcept { return eta_; }
    double horizon() const noexcept { return horizon_; }

    /// f(i, θ). Throws InvalidArgument for θ outside [0,1] or i outside {0,1}.
    double running_cost(int state, double theta) const;
    /// ψ(i, θ). Same domain rules as running_cost.
    double terminal_cost(int state, double theta) const;

    /// f(1, θ) − f(0, θ) at θ = (1+x)/2.
    double cost_difference(double x) const;
    /// ψ(1, θ) − ψ(0, θ) at θ = (1+x)/2.
    double terminal_difference(double x) const;

    double running_bound() const noexcept { return running_bound_; }
    double terminal_bound() const noexcept { return terminal_bound_; }
    double lipschitz_constant() const noexcept { return lipschitz_; }

    /// Invariance of f and ψ under (i, θ) ↦ (1−i, 1−θ), checked on a sample grid.
    bool is_symmetric() const;

    /// Dense-sampling check of boundedness and of the declared Lipschitz
    /// constant; throws InvalidArgument on violation.
    void validate() const;

private:
    CostModel() = default;
    void finalize();
    double running_unchecked(int state, double theta) const;
    double terminal_unchecked(int state, double theta) const;

    CostFamily family_ = CostFamily::zero;
    double eta_ = 0.0;
    double horizon_ = 1.0;
    std::array<double, 2> terminal_constants_{0.0, 0.0};
    std::optional<CostTable> running_table_;
    std::optional<CostTable> terminal_table_;
    double lipschitz_ = 0.0;
    double running_bound_ = 0.0;
    double terminal_bound_ = 0.0;
};

double eval_running_cost(const CostModel& model, int state, double theta);
double eval_terminal_cost(const CostModel& model, int state, double theta);
double cost_difference(const CostModel& model, double x);

}  // namespace mfglab
