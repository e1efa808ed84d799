#include "mfglab/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mfglab/errors.hpp"

namespace mfglab {

namespace {

constexpr int kSamplePoints = 10000;

void check_state(int state) {
    if (state != 0 && state != 1) throw InvalidArgument("player state must be 0 or 1");
}

void check_theta(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("θ must lie in [0, 1]");
}

double sample_theta(int k) { return static_cast<double>(k) / kSamplePoints; }

}  // namespace

std::string_view to_string(CostFamily family) {
    switch (family) {
        case CostFamily::follow: return "follow";
        case CostFamily::avoid: return "avoid";
        case CostFamily::prisoners_dilemma: return "prisoners_dilemma";
        case CostFamily::zero: return "zero";
        case CostFamily::tabulated: return "tabulated";
    }
    return "unknown";
}

CostFamily parse_cost_family(std::string_view name) {
    for (auto f : {CostFamily::follow, CostFamily::avoid, CostFamily::prisoners_dilemma, CostFamily::zero,
                   CostFamily::tabulated}) {
        if (to_string(f) == name) return f;
    }
    throw InvalidArgument("unknown cost family '" + std::string(name) + "'");
}

double CostTable::eval(int state, double th) const {
    const auto& v = values[state];
    if (th <= theta.front()) return v.front();
    if (th >= theta.back()) return v.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(theta.begin(), theta.end(), th) - theta.begin());
    const std::size_t lo = hi - 1;
    const double w = (th - theta[lo]) / (theta[hi] - theta[lo]);
    return (1.0 - w) * v[lo] + w * v[hi];
}

void CostTable::validate(std::string_view what) const {
    const std::string name(what);
    if (theta.size() < 2) throw InvalidArgument(name + ": table needs at least two θ nodes");
    if (theta.front() != 0.0 || theta.back() != 1.0) {
        throw InvalidArgument(name + ": table θ-grid must span [0, 1]");
    }
    for (std::size_t k = 1; k < theta.size(); ++k) {
        if (!(theta[k] > theta[k - 1])) throw InvalidArgument(name + ": table θ-grid must be strictly increasing");
    }
    for (const auto& row : values) {
        if (row.size() != theta.size()) throw InvalidArgument(name + ": table row length differs from θ-grid");
        for (double v : row) {
            if (!std::isfinite(v)) throw InvalidArgument(name + ": table values must be finite");
        }
    }
}

namespace {

double steepest_slope(const CostTable& t) {
    double s = 0.0;
    for (const auto& row : t.values) {
        for (std::size_t k = 1; k < t.theta.size(); ++k) {
            s = std::max(s, std::abs(row[k] - row[k - 1]) / (t.theta[k] - t.theta[k - 1]));
        }
    }
    return s;
}

void check_common(double eta, double horizon) {
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidArgument("η must be finite and nonnegative");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be positive and finite");
}

}  // namespace

void CostModel::finalize() {
    check_common(eta_, horizon_);
    for (double c : terminal_constants_) {
        if (!std::isfinite(c)) throw InvalidArgument("terminal constants must be finite");
    }
    running_bound_ = 0.0;
    terminal_bound_ = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int k = 0; k <= kSamplePoints; ++k) {
            running_bound_ = std::max(running_bound_, std::abs(running_unchecked(i, sample_theta(k))));
            terminal_bound_ = std::max(terminal_bound_, std::abs(terminal_unchecked(i, sample_theta(k))));
        }
        // Table nodes are the only possible extrema of piecewise-linear data.
        if (running_table_) {
            for (double v : running_table_->values[i]) running_bound_ = std::max(running_bound_, std::abs(v));
        }
        if (terminal_table_) {
            for (double v : terminal_table_->values[i]) terminal_bound_ = std::max(terminal_bound_, std::abs(v));
        }
    }
}

CostModel CostModel::follow(double eta, double horizon, std::array<double, 2> terminal) {
    CostModel m;
    m.family_ = CostFamily::follow;
    m.eta_ = eta;
    m.horizon_ = horizon;
    m.terminal_constants_ = terminal;
    m.lipschitz_ = 1.0;
    m.finalize();
    return m;
}

CostModel CostModel::avoid(double eta, double horizon, std::array<double, 2> terminal) {
    CostModel m = follow(eta, horizon, terminal);
    m.family_ = CostFamily::avoid;
    m.finalize();
    return m;
}

CostModel CostModel::prisoners_dilemma(double eta, double horizon, std::array<double, 2> terminal) {
    CostModel m = follow(eta, horizon, terminal);
    m.family_ = CostFamily::prisoners_dilemma;
    m.lipschitz_ = 1.6;
    m.finalize();
    return m;
}

CostModel CostModel::zero(double eta, double horizon) {
    CostModel m;
    m.family_ = CostFamily::zero;
    m.eta_ = eta;
    m.horizon_ = horizon;
    m.lipschitz_ = 0.0;
    m.finalize();
    return m;
}

CostModel CostModel::tabulated(double eta, double horizon, CostTable running, std::array<double, 2> terminal_constants,
                               std::optional<CostTable> terminal_table, std::optional<double> lipschitz) {
    running.validate("running cost");
    if (terminal_table) terminal_table->validate("terminal cost");
    CostModel m;
    m.family_ = CostFamily::tabulated;
    m.eta_ = eta;
    m.horizon_ = horizon;
    m.terminal_constants_ = terminal_constants;
    double slope = steepest_slope(running);
    if (terminal_table) slope = std::max(slope, steepest_slope(*terminal_table));
    if (lipschitz && !(*lipschitz >= 0.0)) throw InvalidArgument("declared Lipschitz constant must be nonnegative");
    m.lipschitz_ = lipschitz.value_or(slope);
    m.running_table_ = std::move(running);
    m.terminal_table_ = std::move(terminal_table);
    m.finalize();
    m.validate();
    return m;
}

CostModel CostModel::with_eta(double eta) const {
    CostModel m = *this;
    m.eta_ = eta;
    m.finalize();
    return m;
}

CostModel CostModel::with_horizon(double horizon) const {
    CostModel m = *this;
    m.horizon_ = horizon;
    m.finalize();
    return m;
}

double CostModel::running_unchecked(int i, double theta) const {
    switch (family_) {
        case CostFamily::follow: return std::abs(1.0 - theta - i);
        case CostFamily::avoid: return std::abs(i - theta);
        case CostFamily::prisoners_dilemma:
            return std::abs(1.0 - i - theta) - 0.6 * theta + (i == 0 ? 0.3 : 0.0);
        case CostFamily::zero: return 0.0;
        case CostFamily::tabulated: return running_table_->eval(i, theta);
    }
    return 0.0;
}

double CostModel::terminal_unchecked(int i, double theta) const {
    if (family_ == CostFamily::zero) return 0.0;
    if (terminal_table_) return terminal_table_->eval(i, theta);
    return terminal_constants_[i];
}

double CostModel::running_cost(int state, double theta) const {
    check_state(state);
    check_theta(theta);
    return running_unchecked(state, theta);
}

double CostModel::terminal_cost(int state, double theta) const {
    check_state(state);
    check_theta(theta);
    return terminal_unchecked(state, theta);
}

double CostModel::cost_difference(double x) const {
    if (!(x >= -1.0 && x <= 1.0)) throw InvalidArgument("centered fraction x must lie in [-1, 1]");
    switch (family_) {
        case CostFamily::follow: return x;
        case CostFamily::avoid: return -x;
        default: break;
    }
    const double theta = std::clamp(0.5 * (1.0 + x), 0.0, 1.0);
    return running_unchecked(1, theta) - running_unchecked(0, theta);
}

double CostModel::terminal_difference(double x) const {
    if (!(x >= -1.0 && x <= 1.0)) throw InvalidArgument("centered fraction x must lie in [-1, 1]");
    const double theta = std::clamp(0.5 * (1.0 + x), 0.0, 1.0);
    return terminal_unchecked(1, theta) - terminal_unchecked(0, theta);
}

bool CostModel::is_symmetric() const {
    constexpr double tol = 1e-12;
    for (int k = 0; k <= 1000; ++k) {
        const double th = k / 1000.0;
        for (int i = 0; i < 2; ++i) {
            if (std::abs(running_unchecked(i, th) - running_unchecked(1 - i, 1.0 - th)) > tol) return false;
            if (std::abs(terminal_unchecked(i, th) - terminal_unchecked(1 - i, 1.0 - th)) > tol) return false;
        }
    }
    return true;
}

void CostModel::validate() const {
    const double h = 1.0 / kSamplePoints;
    const double allowed = lipschitz_ * (1.0 + 1e-9) + 1e-9;
    for (int i = 0; i < 2; ++i) {
        double prev_f = running_unchecked(i, 0.0);
        double prev_psi = terminal_unchecked(i, 0.0);
        for (int k = 1; k <= kSamplePoints; ++k) {
            const double f = running_unchecked(i, sample_theta(k));
            const double psi = terminal_unchecked(i, sample_theta(k));
            if (!std::isfinite(f) || !std::isfinite(psi)) throw InvalidArgument("cost is not finite on [0, 1]");
            if (std::abs(f - prev_f) / h > allowed || std::abs(psi - prev_psi) / h > allowed) {
                throw InvalidArgument("cost exceeds its declared Lipschitz constant near θ = " +
                                      std::to_string(sample_theta(k)));
            }
            prev_f = f;
            prev_psi = psi;
        }
    }
}

// --- JSON -------------------------------------------------------------------

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!obj.is_object()) throw InvalidArgument(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw InvalidArgument("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

double number(const json& obj, const char* key, std::string_view where) {
    if (!obj.contains(key)) throw InvalidArgument(std::string(where) + " is missing '" + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number()) throw InvalidArgument(std::string(where) + "." + key + " must be a number");
    return v.get<double>();
}

std::vector<double> number_array(const json& v, std::string_view what) {
    if (!v.is_array()) throw InvalidArgument(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) throw InvalidArgument(std::string(what) + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace

CostModel CostModel::from_json(const json& d) {
    reject_unknown(d, {"family", "params", "eta", "horizon"}, "game descriptor");
    if (!d.contains("family") || !d.at("family").is_string()) {
        throw InvalidArgument("game descriptor needs a string 'family'");
    }
    const CostFamily family = parse_cost_family(d.at("family").get<std::string>());
    const double eta = number(d, "eta", "game descriptor");
    const double horizon = number(d, "horizon", "game descriptor");
    const json params = d.value("params", json::object());

    auto constants = [&](const json& p) {
        return std::array<double, 2>{p.contains("psi0") ? number(p, "psi0", "params") : 0.0,
                                     p.contains("psi1") ? number(p, "psi1", "params") : 0.0};
    };

    switch (family) {
        case CostFamily::follow:
            reject_unknown(params, {"psi0", "psi1"}, "params");
            return follow(eta, horizon, constants(params));
        case CostFamily::avoid:
            reject_unknown(params, {"psi0", "psi1"}, "params");
            return avoid(eta, horizon, constants(params));
        case CostFamily::prisoners_dilemma:
            reject_unknown(params, {"psi0", "psi1"}, "params");
            return prisoners_dilemma(eta, horizon, constants(params));
        case CostFamily::zero:
            reject_unknown(params, {}, "params");
            return zero(eta, horizon);
        case CostFamily::tabulated: {
            reject_unknown(params, {"theta", "f0", "f1", "psi0", "psi1", "lipschitz"}, "params");
            if (!params.contains("theta") || !params.contains("f0") || !params.contains("f1")) {
                throw InvalidArgument("tabulated params need 'theta', 'f0' and 'f1'");
            }
            CostTable running{number_array(params.at("theta"), "theta"),
                              {number_array(params.at("f0"), "f0"), number_array(params.at("f1"), "f1")}};
            std::array<double, 2> term{0.0, 0.0};
            std::optional<CostTable> term_table;
            const bool psi_rows = (params.contains("psi0") && params.at("psi0").is_array()) ||
                                  (params.contains("psi1") && params.at("psi1").is_array());
            if (psi_rows) {
                if (!params.contains("psi0") || !params.contains("psi1")) {
                    throw InvalidArgument("tabulated terminal cost needs both 'psi0' and 'psi1' rows");
                }
                term_table = CostTable{running.theta,
                                       {number_array(params.at("psi0"), "psi0"), number_array(params.at("psi1"), "psi1")}};
            } else {
                term = constants(params);
            }
            std::optional<double> lip;
            if (params.contains("lipschitz")) lip = number(params, "lipschitz", "params");
            return tabulated(eta, horizon, std::move(running), term, std::move(term_table), lip);
        }
    }
    throw InvalidArgument("unsupported family");
}

nlohmann::json CostModel::to_json() const {
    json params = json::object();
    if (family_ == CostFamily::tabulated) {
        params["theta"] = running_table_->theta;
        params["f0"] = running_table_->values[0];
        params["f1"] = running_table_->values[1];
        params["lipschitz"] = lipschitz_;
    }
    if (terminal_table_) {
        params["psi0"] = terminal_table_->values[0];
        params["psi1"] = terminal_table_->values[1];
    } else if (family_ != CostFamily::zero) {
        params["psi0"] = terminal_constants_[0];
        params["psi1"] = terminal_constants_[1];
    }
    return json{{"family", std::string(to_string(family_))}, {"params", params}, {"eta", eta_}, {"horizon", horizon_}};
}

double eval_running_cost(const CostModel& model, int state, double theta) { return model.running_cost(state, theta); }
double eval_terminal_cost(const CostModel& model, int state, double theta) { return model.terminal_cost(state, theta); }
double cost_difference(const CostModel& model, double x) { return model.cost_difference(x); }

}  // namespace mfglab
