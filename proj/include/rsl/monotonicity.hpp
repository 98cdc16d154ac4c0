// Eigenvalue rate formulas and the monotonicity checks built on them:
// predicted vs observed rates, exponential bounds, and the feasibility
// hypothesis R >= 2a, E >= -a g.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rsl/grid.hpp"
#include "rsl/models.hpp"
#include "rsl/spectral.hpp"

namespace rsl {

struct RateSample {
    double t = 0.0;
    double mu = 0.0;
    double predicted_rate = 0.0;
    double observed_rate = std::numeric_limits<double>::quiet_NaN();  // NaN at endpoints
    double r_min = 0.0;            // scalar curvature range over D
    double r_max = 0.0;
    double a_required = 0.0;       // -lambda_min of g^{-1}E; 0 on 2-D grids
    bool hypothesis_feasible = false;  // <=> 2*a_required <= r_min
    bool clustered = false;        // eigenvalue sat in a near-degenerate cluster
};

// Builds a sample with the feasibility predicate applied.
RateSample make_rate_sample(double t, double mu, double predicted, double observed,
                            double r_min, double r_max, double a_required);

enum class VerdictStatus { Pass, Fail, Skipped };

struct CheckVerdict {
    std::string name;
    VerdictStatus status = VerdictStatus::Skipped;
    std::string reason;
    double err = std::numeric_limits<double>::quiet_NaN();
    double tol = std::numeric_limits<double>::quiet_NaN();
};

struct BoundCheck {
    int part = 0;          // 1: lower bound with R >= C > 0; 2: upper with R <= -C
    double c_used = 0.0;
    double min_slack = 0.0;  // most negative relative slack over the interval
    bool pass = false;
};

struct MonotonicityReport {
    std::vector<RateSample> samples;
    std::vector<CheckVerdict> verdicts;
    std::vector<BoundCheck> bound_checks;
};

// mu * sum(R f^2 dv) over the interior (the 2-D rate formula).
double predicted_rate_2d(const ConformalGrid& grid, const OperatorPair& ops,
                         const EigenPair& pair);

// mu*R + 2*einstein_term with R spatially constant and
// einstein_term = integral(E_ij f_i f_j) supplied in closed form.
double predicted_rate_general(double r_const, double einstein_term, double mu);

// Central difference of a tracked branch; throws IndexOutOfRange unless
// 1 <= i <= len-2.
double observed_rate(const std::vector<double>& times, const std::vector<double>& mus,
                     std::size_t i);

// High-order finite difference of a model eigenvalue branch in t (the second
// route of the model-lane rate check; independent of rate_prediction).
double model_rate_fd(const ModelGeometry& model, int mode, double t, double step);

// |observed - predicted| <= rel_tol * scale at every interior sample;
// clustered samples are skipped (all-clustered => Skipped verdict).
CheckVerdict check_rate_identity(const std::vector<RateSample>& samples, double rel_tol);

// Exponential bounds under a one-signed curvature certificate: part 1 needs
// r_inf > 0 (C = r_inf), part 2 needs r_sup < 0 (C = -r_sup). When neither
// holds the verdict is Skipped with reason "hypothesis not met".
struct Prop1Result {
    BoundCheck bound;
    CheckVerdict verdict;
};
Prop1Result check_proposition1(const std::vector<double>& times, const std::vector<double>& mus,
                               double r_inf, double r_sup, double rel_tol);

// Feasibility at every sample, mu(t_end) >= mu(t_start)*(1 - tol), pointwise
// observed rates >= -tol*mu, and strict increase whenever R is not
// identically 2*a_required.
CheckVerdict check_main_theorem(const std::vector<RateSample>& samples, double rel_tol);

}  // namespace rsl
