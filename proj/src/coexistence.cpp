#include "coexsim/coexistence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coexsim/errors.hpp"

namespace coexsim {

namespace {

constexpr double kLn2 = 0.6931471805599453;

SpectrumAllocation block_layout(std::size_t incumbent_width, std::size_t secondary_width,
                                std::size_t guard) {
    SpectrumAllocation alloc;
    alloc.n_total = incumbent_width + guard + secondary_width;
    alloc.incumbent.resize(incumbent_width);
    std::iota(alloc.incumbent.begin(), alloc.incumbent.end(), std::size_t{0});
    alloc.secondary.resize(secondary_width);
    std::iota(alloc.secondary.begin(), alloc.secondary.end(), incumbent_width + guard);
    return alloc;
}

} // namespace

double guard_band_metric_db(const InterferenceTable& table, std::size_t incumbent_width,
                            std::size_t secondary_width, std::size_t guard) {
    const auto alloc = block_layout(incumbent_width, secondary_width, guard);
    const double total =
        total_interference(table, alloc, Direction::SecondaryToIncumbent, true);
    const double mean = total / static_cast<double>(incumbent_width);
    return 10.0 * std::log10(std::max(mean, 1e-300));
}

GuardBandResult required_guard_band(const InterferenceTable& table, std::size_t incumbent_width,
                                    std::size_t secondary_width, double constraint_db,
                                    std::size_t ceiling) {
    if (incumbent_width == 0 || secondary_width == 0)
        throw config_error("incumbent and secondary widths must be positive");

    GuardBandResult result;
    result.constraint_db = constraint_db;
    result.model = table.model;
    result.incumbent_width = incumbent_width;
    result.secondary_width = secondary_width;
    result.ceiling = ceiling;

    auto ok = [&](std::size_t g) {
        return guard_band_metric_db(table, incumbent_width, secondary_width, g) <= constraint_db;
    };

    std::size_t g = 0;
    if (!ok(0)) {
        std::size_t hi = 1;
        while (hi <= ceiling && !ok(hi)) hi *= 2;
        if (hi > ceiling && !ok(ceiling)) {
            result.satisfiable = false;
            result.guard = ceiling;
            result.achieved_db =
                guard_band_metric_db(table, incumbent_width, secondary_width, ceiling);
            return result;
        }
        hi = std::min(hi, ceiling);
        std::size_t lo = hi / 2; // violates the constraint
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (ok(mid))
                hi = mid;
            else
                lo = mid;
        }
        g = hi;
    }
    while (g > 0 && ok(g - 1)) --g; // guards against non-monotone table noise

    result.guard = g;
    result.achieved_db = guard_band_metric_db(table, incumbent_width, secondary_width, g);
    if (g > 0)
        result.violated_db = guard_band_metric_db(table, incumbent_width, secondary_width, g - 1);
    return result;
}

std::string to_string(PowerAllocationResult::Binding binding) {
    switch (binding) {
        case PowerAllocationResult::Binding::None: return "none";
        case PowerAllocationResult::Binding::Power: return "power";
        case PowerAllocationResult::Binding::Interference: return "interference";
        default: return "both";
    }
}

namespace {

struct Problem {
    std::span<const double> gamma; // g_k / n_k
    std::span<const double> weights;
    double p_total;
    double i_threshold;
};

// Stationarity solution at fixed multipliers.
void fill_powers(const Problem& prob, double lambda, double mu, std::vector<double>& p) {
    const std::size_t n = prob.gamma.size();
    p.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double cost = lambda + mu * prob.weights[k];
        const double level = cost > 0.0 ? 1.0 / (kLn2 * cost) : HUGE_VAL;
        p[k] = std::max(0.0, level - 1.0 / prob.gamma[k]);
    }
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double weighted_sum(std::span<const double> w, const std::vector<double>& p) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) acc += w[k] * p[k];
    return acc;
}

// Bisect lambda so that total power equals the budget (mu fixed).
double solve_lambda(const Problem& prob, double mu, std::vector<double>& p) {
    double hi = 0.0;
    for (std::size_t k = 0; k < prob.gamma.size(); ++k)
        hi = std::max(hi, prob.gamma[k] / kLn2 - mu * prob.weights[k]);
    hi = std::max(hi, 1e-30);
    double lo = 1e-30;
    fill_powers(prob, lo, mu, p);
    if (sum(p) <= prob.p_total) return lo; // budget slack even at tiny lambda
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        fill_powers(prob, mid, mu, p);
        if (sum(p) > prob.p_total)
            lo = mid;
        else
            hi = mid;
    }
    fill_powers(prob, hi, mu, p);
    return hi;
}

// Bisect mu so that weighted interference equals the budget (lambda = 0).
double solve_mu(const Problem& prob, std::vector<double>& p) {
    double hi = 0.0;
    for (std::size_t k = 0; k < prob.gamma.size(); ++k)
        if (prob.weights[k] > 0.0) hi = std::max(hi, prob.gamma[k] / (kLn2 * prob.weights[k]));
    hi = std::max(hi, 1e-30);
    double lo = 1e-30;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        fill_powers(prob, 0.0, mid, p);
        if (weighted_sum(prob.weights, p) > prob.i_threshold)
            lo = mid;
        else
            hi = mid;
    }
    fill_powers(prob, 0.0, hi, p);
    return hi;
}

double capacity_of(const Problem& prob, const std::vector<double>& p) {
    double c = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) c += std::log2(1.0 + p[k] * prob.gamma[k]);
    return c;
}

double kkt_residual_of(const Problem& prob, const std::vector<double>& p, double lambda,
                       double mu) {
    // Stationarity: active subcarriers have marginal utility equal to the
    // marginal cost; inactive ones must not beat it.  All terms relative.
    double res = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double cost = lambda + mu * prob.weights[k];
        const double marginal = prob.gamma[k] / (kLn2 * (1.0 + p[k] * prob.gamma[k]));
        if (p[k] > 1e-12)
            res = std::max(res, std::abs(marginal - cost) / std::max(cost, 1e-300));
        else if (marginal > cost)
            res = std::max(res, (marginal - cost) / std::max(cost, 1e-300));
    }
    // Primal feasibility and complementary slackness.
    const double sp = sum(p);
    const double si = weighted_sum(prob.weights, p);
    res = std::max(res, (sp - prob.p_total) / prob.p_total);
    res = std::max(res, (si - prob.i_threshold) / prob.i_threshold);
    res = std::max(res, lambda * std::abs(prob.p_total - sp) / std::max(1.0, prob.p_total));
    res = std::max(res,
                   mu * std::abs(prob.i_threshold - si) / std::max(1.0, prob.i_threshold));
    return std::max(res, 0.0);
}

} // namespace

PowerAllocationResult allocate_power(std::span<const double> gains, std::span<const double> noise,
                                     std::span<const double> weights, double p_total,
                                     double i_threshold) {
    const std::size_t n = gains.size();
    if (n == 0) throw config_error("allocate_power needs at least one subcarrier");
    if (noise.size() != n || weights.size() != n)
        throw config_error("gains, noise and weights must have equal length");
    if (p_total <= 0.0) throw config_error("total power budget must be positive");
    if (i_threshold <= 0.0) throw config_error("interference budget must be positive");
    for (std::size_t k = 0; k < n; ++k) {
        if (gains[k] <= 0.0) throw config_error("channel gains must be positive");
        if (noise[k] <= 0.0) throw config_error("noise powers must be positive");
        if (weights[k] < 0.0) throw config_error("interference weights must be nonnegative");
    }

    std::vector<double> gamma(n);
    for (std::size_t k = 0; k < n; ++k) gamma[k] = gains[k] / noise[k];
    Problem prob{gamma, weights, p_total, i_threshold};

    const double tol = 1e-9;
    std::vector<double> p;
    double lambda = 0.0, mu = 0.0;
    PowerAllocationResult::Binding binding;

    // Power-only water-filling first.
    lambda = solve_lambda(prob, 0.0, p);
    if (weighted_sum(weights, p) <= i_threshold * (1.0 + tol)) {
        binding = PowerAllocationResult::Binding::Power;
    } else {
        // Interference-only (only possible when every weight is positive;
        // a zero-weight subcarrier would soak unbounded power).
        bool interference_only_ok = std::all_of(weights.begin(), weights.end(),
                                                [](double w) { return w > 0.0; });
        if (interference_only_ok) {
            mu = solve_mu(prob, p);
            lambda = 0.0;
            interference_only_ok = sum(p) <= p_total * (1.0 + tol);
        }
        if (interference_only_ok) {
            binding = PowerAllocationResult::Binding::Interference;
        } else {
            // Both constraints bind: outer bisection on mu with the inner
            // lambda keeping the power budget tight.
            double mu_lo = 0.0;       // interference violated
            double mu_hi = 1e-12;
            bool bracketed = false;
            for (int it = 0; it < 400; ++it) {
                lambda = solve_lambda(prob, mu_hi, p);
                if (weighted_sum(weights, p) <= i_threshold) {
                    bracketed = true;
                    break;
                }
                mu_lo = mu_hi;
                mu_hi *= 2.0;
            }
            if (!bracketed)
                throw numerical_error("failed to bracket the interference multiplier");
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (mu_lo + mu_hi);
                lambda = solve_lambda(prob, mid, p);
                if (weighted_sum(weights, p) > i_threshold)
                    mu_lo = mid;
                else
                    mu_hi = mid;
            }
            mu = mu_hi;
            lambda = solve_lambda(prob, mu, p);
            binding = PowerAllocationResult::Binding::Both;
        }
    }

    PowerAllocationResult result;
    result.powers = p;
    result.capacity = capacity_of(prob, p);
    result.lambda = lambda;
    result.mu = mu;
    result.total_power = sum(p);
    result.total_interference = weighted_sum(weights, p);
    result.kkt_residual = kkt_residual_of(prob, p, lambda, mu);

    // Demote the binding label when a constraint is actually slack.
    const bool power_tight = result.total_power >= p_total * (1.0 - 1e-6);
    const bool intf_tight = result.total_interference >= i_threshold * (1.0 - 1e-6);
    if (power_tight && intf_tight)
        result.binding = PowerAllocationResult::Binding::Both;
    else if (power_tight)
        result.binding = PowerAllocationResult::Binding::Power;
    else if (intf_tight)
        result.binding = PowerAllocationResult::Binding::Interference;
    else
        result.binding = binding == PowerAllocationResult::Binding::Power &&
                                 result.total_power < p_total * (1.0 - 1e-6)
                             ? PowerAllocationResult::Binding::None
                             : binding;
    return result;
}

double lagrangian_dual_bound(std::span<const double> gains, std::span<const double> noise,
                             std::span<const double> weights, double p_total, double i_threshold,
                             double lambda, double mu) {
    const std::size_t n = gains.size();
    double q = lambda * p_total + mu * i_threshold;
    for (std::size_t k = 0; k < n; ++k) {
        const double gamma = gains[k] / noise[k];
        const double cost = lambda + mu * weights[k];
        double p = cost > 0.0 ? std::max(0.0, 1.0 / (kLn2 * cost) - 1.0 / gamma) : HUGE_VAL;
        if (!std::isfinite(p)) return HUGE_VAL;
        q += std::log2(1.0 + p * gamma) - cost * p;
    }
    return q;
}

CoexScenario CoexScenario::standard_60() {
    CoexScenario s;
    s.alloc.n_total = 60;
    for (std::size_t i = 20; i < 40; ++i) s.alloc.incumbent.push_back(i);
    for (std::size_t i = 0; i < 20; ++i) s.alloc.secondary.push_back(i);
    for (std::size_t i = 40; i < 60; ++i) s.alloc.secondary.push_back(i);
    return s;
}

double CoexScenario::noise_per_subcarrier() const {
    const double n_sec = static_cast<double>(alloc.secondary.size());
    return p_total / (n_sec * std::pow(10.0, snr_db / 10.0));
}

CapacityCurve secondary_capacity_curve(const CoexScenario& scenario,
                                       const InterferenceTable& table_psd,
                                       const InterferenceTable& table_evm,
                                       std::span<const double> i_th_sweep) {
    scenario.alloc.validate();
    if (i_th_sweep.empty()) throw config_error("empty I_th sweep");
    const std::size_t n = scenario.alloc.secondary.size();
    const std::vector<double> gains(n, 1.0);
    const std::vector<double> noise(n, scenario.noise_per_subcarrier());
    const auto w_psd = injection_weights(table_psd, scenario.alloc);
    const auto w_evm = injection_weights(table_evm, scenario.alloc);

    CapacityCurve curve;
    curve.i_th.assign(i_th_sweep.begin(), i_th_sweep.end());
    for (double i_th : i_th_sweep) {
        curve.psd.push_back(allocate_power(gains, noise, w_psd, scenario.p_total, i_th));
        curve.evm.push_back(allocate_power(gains, noise, w_evm, scenario.p_total, i_th));
    }
    return curve;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (n < 2 || lo <= 0.0 || hi <= lo) throw config_error("invalid log sweep parameters");
    std::vector<double> v(n);
    const double step = std::log10(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo * std::pow(10.0, step * static_cast<double>(i));
    return v;
}

} // namespace coexsim
