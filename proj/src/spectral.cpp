#include "rsl/spectral.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rsl/geometry.hpp"

namespace rsl {

namespace {

Eigen::SparseMatrix<double> sparse_diag(const Eigen::VectorXd& d) {
    Eigen::SparseMatrix<double> m(d.size(), d.size());
    m.reserve(Eigen::VectorXi::Constant(static_cast<int>(d.size()), 1));
    for (int i = 0; i < d.size(); ++i) m.insert(i, i) = d[i];
    m.makeCompressed();
    return m;
}

struct SolverWorkspace {
    const Eigen::SparseMatrix<double>& A;
    const Eigen::VectorXd& M;
    EigenConstraint constraint;
    double mass_total = 0.0;
    std::vector<Eigen::VectorXd> converged;

    // Keep x M-orthogonal to converged modes and (MeanZero) to constants.
    void project(Eigen::VectorXd& x) const {
        for (int pass = 0; pass < 2; ++pass) {
            if (constraint == EigenConstraint::MeanZero)
                x.array() -= M.dot(x) / mass_total;
            for (const auto& f : converged) x -= f.dot(M.cwiseProduct(x)) * f;
        }
    }
    double m_norm(const Eigen::VectorXd& x) const { return std::sqrt(x.dot(M.cwiseProduct(x))); }
    double rayleigh(const Eigen::VectorXd& x) const { return x.dot(A * x); }  // needs m_norm == 1
    double residual(const Eigen::VectorXd& x, double theta) const {
        const Eigen::VectorXd mx = M.cwiseProduct(x);
        return (A * x - theta * mx).norm() / mx.norm();
    }
};

}  // namespace

OperatorPair assemble(const ConformalGrid& grid, const DomainMask& mask) {
    grid.validate();
    mask.validate(grid);
    OperatorPair ops;
    ops.nx = grid.nx;
    ops.ny = grid.ny;
    ops.topology = grid.topology;

    std::vector<int> to_interior(static_cast<std::size_t>(grid.size()), -1);
    for (int k = 0; k < grid.size(); ++k)
        if (mask.is_interior(k)) {
            to_interior[k] = static_cast<int>(ops.interior_nodes.size());
            ops.interior_nodes.push_back(k);
        }
    const int n = ops.dim();
    if (n == 0) throw EmptyInterior("domain mask has no interior node");

    const ScalarField w = volume_weights(grid);
    ops.mass.resize(n);
    for (int p = 0; p < n; ++p) ops.mass[p] = w[ops.interior_nodes[p]];

    const double wx = grid.hy / grid.hx, wy = grid.hx / grid.hy;
    const bool periodic = grid.topology == Topology::PeriodicTorus;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 5);
    for (int p = 0; p < n; ++p) {
        const int node = ops.interior_nodes[p];
        const int i = node % grid.nx, j = node / grid.nx;
        trips.emplace_back(p, p, 2.0 * wx + 2.0 * wy);
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        const double weight[4] = {wx, wx, wy, wy};
        for (int d = 0; d < 4; ++d) {
            int ii = i + di[d], jj = j + dj[d];
            if (periodic) {
                ii = (ii + grid.nx) % grid.nx;
                jj = (jj + grid.ny) % grid.ny;
            } else if (ii < 0 || jj < 0 || ii >= grid.nx || jj >= grid.ny) {
                continue;
            }
            const int q = to_interior[grid.index(ii, jj)];
            if (q >= 0) trips.emplace_back(p, q, -weight[d]);
            // exterior neighbor: Dirichlet elimination keeps the diagonal
        }
    }
    ops.stiffness.resize(n, n);
    ops.stiffness.setFromTriplets(trips.begin(), trips.end());
    ops.stiffness.makeCompressed();
    return ops;
}

std::vector<EigenPair> smallest_eigenpairs(const OperatorPair& ops, int count, double tol,
                                           EigenConstraint constraint) {
    const int n = ops.dim();
    if (count < 1 || count > 20) throw Error("eigenpair count must lie in [1, 20]");
    if (!(tol >= 1e-12 && tol <= 1e-4)) throw Error("solver tolerance must lie in [1e-12, 1e-4]");
    const int usable = n - (constraint == EigenConstraint::MeanZero ? 1 : 0);
    if (count > usable) throw Error("requested more eigenpairs than the problem dimension");

    SolverWorkspace ws{ops.stiffness, ops.mass, constraint, ops.mass.sum(), {}};

    std::mt19937_64 rng(0x5eed5eedULL);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto random_start = [&]() {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x[i] = unit(rng);
        ws.project(x);
        const double nm = ws.m_norm(x);
        if (!(nm > 0.0)) throw Error("degenerate random start");
        x /= nm;
        return x;
    };

    // Base SPD factorization A + sigma0 M; sigma0 > 0 shifts the constant
    // kernel away on the torus (iterates are projected off it as well).
    double sigma0 = 0.0;
    if (constraint == EigenConstraint::MeanZero) {
        Eigen::VectorXd probe = random_start();
        sigma0 = 1e-3 * ws.rayleigh(probe);
    }
    const Eigen::SparseMatrix<double> m_diag = sparse_diag(ops.mass);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> base;
    if (sigma0 > 0.0) {
        Eigen::SparseMatrix<double> shifted = ops.stiffness + sigma0 * m_diag;
        base.compute(shifted);
    } else {
        base.compute(ops.stiffness);
    }
    if (base.info() != Eigen::Success) throw Error("base factorization failed");

    std::vector<EigenPair> out;
    for (int mode = 0; mode < count; ++mode) {
        Eigen::VectorXd x = random_start();
        double theta = ws.rayleigh(x);
        double res = ws.residual(x, theta);
        bool done = false;

        double prev_theta = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 40 && !done; ++it) {
            Eigen::VectorXd y = base.solve(ops.mass.cwiseProduct(x));
            ws.project(y);
            const double nm = ws.m_norm(y);
            if (!(nm > 0.0) || !std::isfinite(nm))
                throw NoConvergence("inverse iteration collapsed for mode " +
                                        std::to_string(mode),
                                    mode);
            y /= nm;
            theta = ws.rayleigh(y);
            res = ws.residual(y, theta);
            x = y;
            if (res <= tol) done = true;
            else if (it >= 3 && std::fabs(theta - prev_theta) <= 1e-6 * std::fabs(theta)) break;
            prev_theta = theta;
        }

        // Rayleigh-quotient shift-and-invert refinement.
        for (int refactor = 0; refactor < 10 && !done; ++refactor) {
            double shift = theta;
            Eigen::SparseMatrix<double> shifted = ops.stiffness - shift * m_diag;
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
            lu.compute(shifted);
            if (lu.info() != Eigen::Success) {
                shift = theta * (1.0 + 1e-10) + 1e-14;
                shifted = ops.stiffness - shift * m_diag;
                lu.compute(shifted);
                if (lu.info() != Eigen::Success)
                    throw NoConvergence("shifted factorization failed for mode " +
                                            std::to_string(mode),
                                        mode);
            }
            for (int inner = 0; inner < 3 && !done; ++inner) {
                Eigen::VectorXd y = lu.solve(ops.mass.cwiseProduct(x));
                ws.project(y);
                const double nm = ws.m_norm(y);
                if (!(nm > 0.0) || !std::isfinite(nm)) break;
                y /= nm;
                theta = ws.rayleigh(y);
                res = ws.residual(y, theta);
                x = y;
                if (res <= tol) done = true;
            }
        }
        if (!done)
            throw NoConvergence("eigenpair " + std::to_string(mode) +
                                    " did not reach the residual tolerance (last residual " +
                                    std::to_string(res) + ")",
                                mode);

        // Deterministic sign: the largest-magnitude component is positive.
        int arg = 0;
        for (int i = 1; i < n; ++i)
            if (std::fabs(x[i]) > std::fabs(x[arg])) arg = i;
        if (x[arg] < 0.0) x = -x;
        x /= ws.m_norm(x);
        theta = ws.rayleigh(x);

        out.push_back(EigenPair{theta, x, ws.residual(x, theta), mode});
        ws.converged.push_back(x);
    }

    std::stable_sort(out.begin(), out.end(),
                     [](const EigenPair& a, const EigenPair& b) { return a.mu < b.mu; });
    for (int i = 0; i < count; ++i) out[i].mode_index = i;
    return out;
}

TrackResult track_mode(const EigenPair& prev, const std::vector<EigenPair>& candidates,
                       const Eigen::VectorXd& mass) {
    if (candidates.empty()) throw Error("track_mode needs at least one candidate");
    double best = 0.0, second = 0.0;
    int arg = 0;
    for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
        if (candidates[c].f.size() != prev.f.size())
            throw Error("track_mode candidates must share the interior dimension");
        const double o = std::fabs(prev.f.dot(mass.cwiseProduct(candidates[c].f)));
        if (o > best) {
            second = best;
            best = o;
            arg = c;
        } else if (o > second) {
            second = o;
        }
    }
    TrackResult result;
    result.pair = candidates[arg];
    const double signed_overlap = prev.f.dot(mass.cwiseProduct(candidates[arg].f));
    if (signed_overlap < 0.0) result.pair.f = -result.pair.f;
    result.overlap = best;
    result.ambiguous = candidates.size() > 1 && (best - second) < 0.1;
    return result;
}

bool is_clustered(const std::vector<EigenPair>& pairs, int idx, double rel_gap) {
    const auto [lo, hi] = cluster_range(pairs, idx, rel_gap);
    return hi > lo;
}

std::pair<int, int> cluster_range(const std::vector<EigenPair>& pairs, int idx, double rel_gap) {
    const int n = static_cast<int>(pairs.size());
    if (idx < 0 || idx >= n) throw IndexOutOfRange("cluster index outside the eigenpair list");
    auto close = [&](int a, int b) {
        const double scale = std::max({std::fabs(pairs[a].mu), std::fabs(pairs[b].mu), 1e-300});
        return std::fabs(pairs[a].mu - pairs[b].mu) < rel_gap * scale;
    };
    int lo = idx, hi = idx;
    while (lo > 0 && close(lo - 1, lo)) --lo;
    while (hi + 1 < n && close(hi, hi + 1)) ++hi;
    return {lo, hi};
}

ScalarField to_grid_field(const OperatorPair& ops, const Eigen::VectorXd& f) {
    ScalarField out(static_cast<std::size_t>(ops.nx) * ops.ny, 0.0);
    for (int p = 0; p < ops.dim(); ++p) out[ops.interior_nodes[p]] = f[p];
    return out;
}

}  // namespace rsl
