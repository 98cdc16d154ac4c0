#include "rsl/monotonicity.hpp"

#include <algorithm>
#include <cmath>

#include "rsl/detail/timefd.hpp"
#include "rsl/geometry.hpp"

namespace rsl {

RateSample make_rate_sample(double t, double mu, double predicted, double observed, double r_min,
                            double r_max, double a_required) {
    RateSample s;
    s.t = t;
    s.mu = mu;
    s.predicted_rate = predicted;
    s.observed_rate = observed;
    s.r_min = r_min;
    s.r_max = r_max;
    s.a_required = a_required;
    s.hypothesis_feasible = 2.0 * a_required <= r_min;
    return s;
}

double predicted_rate_2d(const ConformalGrid& grid, const OperatorPair& ops,
                         const EigenPair& pair) {
    const ScalarField r = scalar_curvature(grid);
    double acc = 0.0;
    for (int p = 0; p < ops.dim(); ++p) {
        const double f = pair.f[p];
        acc += r[ops.interior_nodes[p]] * f * f * ops.mass[p];
    }
    return pair.mu * acc;
}

double predicted_rate_general(double r_const, double einstein_term, double mu) {
    return mu * r_const + 2.0 * einstein_term;
}

double observed_rate(const std::vector<double>& times, const std::vector<double>& mus,
                     std::size_t i) {
    if (times.size() != mus.size()) throw Error("times and eigenvalues must align");
    if (times.size() < 3 || i < 1 || i + 1 >= times.size())
        throw IndexOutOfRange("observed_rate needs an interior snapshot index");
    return (mus[i + 1] - mus[i - 1]) / (times[i + 1] - times[i - 1]);
}

double model_rate_fd(const ModelGeometry& model, int mode, double t, double step) {
    return detail::fd4_time([&](double s) { return model.eigenvalue(mode, s); }, t, step,
                            model.maximal_time());
}

CheckVerdict check_rate_identity(const std::vector<RateSample>& samples, double rel_tol) {
    CheckVerdict v;
    v.name = "rate";
    v.tol = rel_tol;
    double worst = 0.0;
    int used = 0, skipped = 0;
    for (const auto& s : samples) {
        if (!std::isfinite(s.observed_rate)) continue;  // endpoints
        if (s.clustered) {
            ++skipped;
            continue;
        }
        const double scale = std::max({std::fabs(s.predicted_rate), std::fabs(s.observed_rate),
                                       1e-8 * std::fabs(s.mu), 1e-300});
        worst = std::max(worst, std::fabs(s.predicted_rate - s.observed_rate) / scale);
        ++used;
    }
    if (used == 0) {
        v.status = VerdictStatus::Skipped;
        v.reason = skipped > 0 ? "all interior samples clustered" : "no interior samples";
        return v;
    }
    v.err = worst;
    v.status = worst <= rel_tol ? VerdictStatus::Pass : VerdictStatus::Fail;
    v.reason = skipped > 0 ? "clustered samples skipped" : "predicted vs observed rate";
    return v;
}

Prop1Result check_proposition1(const std::vector<double>& times, const std::vector<double>& mus,
                               double r_inf, double r_sup, double rel_tol) {
    if (times.size() != mus.size() || times.size() < 2)
        throw Error("proposition check needs at least two aligned samples");
    Prop1Result result;
    result.verdict.name = "prop1";
    result.verdict.tol = rel_tol;
    if (r_inf > 0.0) {
        result.bound.part = 1;
        result.bound.c_used = r_inf;
    } else if (r_sup < 0.0) {
        result.bound.part = 2;
        result.bound.c_used = -r_sup;
    } else {
        result.verdict.status = VerdictStatus::Skipped;
        result.verdict.reason = "hypothesis not met: R changes sign on the interval";
        return result;
    }
    const double t0 = times.front(), mu0 = mus.front();
    double min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double dt = times[i] - t0;
        double slack;
        if (result.bound.part == 1) {
            const double bound = mu0 * std::exp(result.bound.c_used * dt);
            slack = (mus[i] - bound) / bound;
        } else {
            const double bound = mu0 * std::exp(-result.bound.c_used * dt);
            slack = (bound - mus[i]) / bound;
        }
        min_slack = std::min(min_slack, slack);
    }
    result.bound.min_slack = min_slack;
    result.bound.pass = min_slack >= -rel_tol;
    result.verdict.err = -std::min(min_slack, 0.0);
    result.verdict.status = result.bound.pass ? VerdictStatus::Pass : VerdictStatus::Fail;
    result.verdict.reason = result.bound.part == 1 ? "exponential lower bound"
                                                   : "exponential upper bound";
    return result;
}

CheckVerdict check_main_theorem(const std::vector<RateSample>& samples, double rel_tol) {
    CheckVerdict v;
    v.name = "main_theorem";
    v.tol = rel_tol;
    if (samples.size() < 2) {
        v.status = VerdictStatus::Skipped;
        v.reason = "needs at least two samples";
        return v;
    }
    for (const auto& s : samples)
        if (!s.hypothesis_feasible) {
            v.status = VerdictStatus::Skipped;
            v.reason = "hypothesis not met: no constant a with E >= -a g and R >= 2a";
            return v;
        }

    const double mu_start = samples.front().mu, mu_end = samples.back().mu;
    double worst = (mu_start - mu_end) / std::max(std::fabs(mu_start), 1e-300);
    for (const auto& s : samples) {
        if (!std::isfinite(s.observed_rate)) continue;
        const double slack = -s.observed_rate / std::max(std::fabs(s.mu), 1e-300);
        worst = std::max(worst, slack);
    }

    // Strictness clause: R not identically 2a somewhere forces real growth.
    bool strict_expected = false;
    for (const auto& s : samples) {
        const double scale = std::max({std::fabs(s.r_max), 2.0 * std::fabs(s.a_required), 1.0});
        if (s.r_max - 2.0 * s.a_required > 1e-9 * scale ||
            2.0 * s.a_required - s.r_min > 1e-9 * scale) {
            strict_expected = true;
            break;
        }
    }
    bool ok = worst <= rel_tol;
    std::string reason = "mu non-decreasing (direction: mu' >= 0, not non-increasing)";
    if (strict_expected) {
        const bool grew = mu_end - mu_start > rel_tol * std::fabs(mu_start);
        if (!grew) ok = false;
        reason += grew ? "; strict increase confirmed" : "; strict increase expected but absent";
    } else {
        reason += "; boundary case R = 2a, zero rate admissible";
    }
    v.err = worst;
    v.status = ok ? VerdictStatus::Pass : VerdictStatus::Fail;
    v.reason = reason;
    return v;
}

}  // namespace rsl
