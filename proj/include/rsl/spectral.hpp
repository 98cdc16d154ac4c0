// Discrete eigenproblem -Delta_g f = mu f: assembly of the generalized
// stiffness/mass pair, smallest-eigenpair solves and mode tracking in time.
#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "rsl/grid.hpp"

namespace rsl {

struct EigenPair {
    double mu = 0.0;
    Eigen::VectorXd f;       // interior nodes, normalized so f' M f = 1
    double residual = 0.0;   // ||A f - mu M f|| / ||M f||
    int mode_index = 0;
};

// Generalized pair A f = mu M f. The stiffness is the flat 5-point form
// (metric independent in 2-D conformal coordinates); all metric dependence
// sits in the lumped mass diagonal e^{2*phi} hx hy.
struct OperatorPair {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::VectorXd mass;                // diagonal entries, > 0
    std::vector<int> interior_nodes;     // interior index -> grid node
    int nx = 0;
    int ny = 0;
    Topology topology = Topology::PeriodicTorus;

    int dim() const { return static_cast<int>(interior_nodes.size()); }
};

enum class EigenConstraint { None, MeanZero };

struct TrackResult {
    EigenPair pair;
    double overlap = 0.0;
    bool ambiguous = false;  // top two overlaps closer than 0.1
};

// Throws EmptyInterior when the mask has no interior node.
OperatorPair assemble(const ConformalGrid& grid, const DomainMask& mask);

// The `count` smallest eigenpairs, ascending, via shift-and-invert Rayleigh
// quotient iteration with deflation against converged modes. With MeanZero
// all iterates are kept M-orthogonal to the constant vector. Throws
// NoConvergence when the iteration cap is hit.
std::vector<EigenPair> smallest_eigenpairs(const OperatorPair& ops, int count, double tol,
                                           EigenConstraint constraint);

// Candidate maximizing |<f_prev, M f>|, sign-flipped so the overlap is
// positive. `mass` is the diagonal at the candidates' time.
TrackResult track_mode(const EigenPair& prev, const std::vector<EigenPair>& candidates,
                       const Eigen::VectorXd& mass);

// True when the eigenvalue sits in a near-degenerate cluster (relative gap
// below `rel_gap` to a neighbor).
bool is_clustered(const std::vector<EigenPair>& pairs, int idx, double rel_gap = 1e-6);

// Contiguous index range [first, last] of the cluster containing idx.
std::pair<int, int> cluster_range(const std::vector<EigenPair>& pairs, int idx,
                                  double rel_gap = 1e-6);

// Scatter an interior vector onto the full grid (zero on exterior nodes).
ScalarField to_grid_field(const OperatorPair& ops, const Eigen::VectorXd& f);

}  // namespace rsl
