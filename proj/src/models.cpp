#include "rsl/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rsl {

namespace {

constexpr int kLadderSize = 64;

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw Error(std::string(what) + " must be positive");
}

}  // namespace

ModelGeometry ModelGeometry::round_sphere(int dim, double radius) {
    if (dim < 2) throw Error("round spheres need dimension >= 2");
    require_positive(radius, "sphere radius");
    ModelGeometry m;
    m.family_ = ModelFamily::RoundSphere;
    m.dim_ = dim;
    m.radius_ = radius;
    return m;
}

ModelGeometry ModelGeometry::hyperbolic_scaled(double scale, std::vector<double> spectrum) {
    require_positive(scale, "hyperbolic scale");
    for (double lam : spectrum)
        if (!(lam > 0.0)) throw Error("hyperbolic spectrum entries must be positive");
    std::sort(spectrum.begin(), spectrum.end());
    ModelGeometry m;
    m.family_ = ModelFamily::HyperbolicScaled;
    m.dim_ = 2;
    m.scale_ = scale;
    m.spectrum_ = std::move(spectrum);
    return m;
}

ModelGeometry ModelGeometry::flat_torus(double lx, double ly) {
    require_positive(lx, "torus side");
    require_positive(ly, "torus side");
    ModelGeometry m;
    m.family_ = ModelFamily::FlatTorus;
    m.dim_ = 2;
    m.torus_lx_ = lx;
    m.torus_ly_ = ly;
    // Distinct nonzero lattice eigenvalues (2 pi p / Lx)^2 + (2 pi q / Ly)^2.
    const double cx = 2.0 * std::numbers::pi / lx, cy = 2.0 * std::numbers::pi / ly;
    std::vector<double> vals;
    const int pmax = 2 * kLadderSize;
    for (int p = 0; p <= pmax; ++p)
        for (int q = 0; q <= pmax; ++q) {
            if (p == 0 && q == 0) continue;
            vals.push_back(cx * cx * p * p + cy * cy * q * q);
        }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    vals.resize(kLadderSize);
    m.torus_ladder_ = std::move(vals);
    return m;
}

ModelGeometry ModelGeometry::sphere_circle_product(double sphere_radius, double circle_radius) {
    require_positive(sphere_radius, "sphere radius");
    require_positive(circle_radius, "circle radius");
    ModelGeometry m;
    m.family_ = ModelFamily::SphereCircleProduct;
    m.dim_ = 3;
    m.radius_ = sphere_radius;
    m.circle_radius_ = circle_radius;
    // (l, m) pairs ordered by eigenvalue at t = 0, ties by (l, m); the
    // ordering is frozen so mode indices follow smooth branches in t.
    struct Entry {
        double lam;
        int l, mm;
    };
    std::vector<Entry> entries;
    const double a2 = sphere_radius * sphere_radius;
    const double b2 = circle_radius * circle_radius;
    const int lmax = 2 * kLadderSize;
    for (int l = 0; l <= lmax; ++l)
        for (int mm = 0; mm <= lmax; ++mm) {
            if (l == 0 && mm == 0) continue;
            entries.push_back({l * (l + 1.0) / a2 + mm * mm / b2, l, mm});
        }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.lam != b.lam) return a.lam < b.lam;
        if (a.l != b.l) return a.l < b.l;
        return a.mm < b.mm;
    });
    entries.resize(kLadderSize);
    m.product_ladder_.reserve(entries.size());
    for (const auto& e : entries) m.product_ladder_.emplace_back(e.l, e.mm);
    return m;
}

double ModelGeometry::maximal_time() const {
    switch (family_) {
        case ModelFamily::RoundSphere:
            return radius_ * radius_ / (2.0 * (dim_ - 1));
        case ModelFamily::SphereCircleProduct:
            return radius_ * radius_ / 2.0;
        default:
            return kInfiniteTime;
    }
}

void ModelGeometry::require_time(double t) const {
    if (!(t >= 0.0) || !(t < maximal_time()))
        throw TimeOutOfRange("time " + std::to_string(t) + " outside [0, " +
                             std::to_string(maximal_time()) + ")");
}

double ModelGeometry::sphere_radius_sq(double t) const {
    if (family_ == ModelFamily::RoundSphere) return radius_ * radius_ - 2.0 * (dim_ - 1) * t;
    if (family_ == ModelFamily::SphereCircleProduct) return radius_ * radius_ - 2.0 * t;
    throw Error("sphere_radius_sq: model has no sphere factor");
}

double ModelGeometry::hyperbolic_scale(double t) const {
    if (family_ != ModelFamily::HyperbolicScaled)
        throw Error("hyperbolic_scale: not a hyperbolic model");
    return scale_ + 2.0 * t;
}

double ModelGeometry::scalar_curvature(double t) const {
    require_time(t);
    switch (family_) {
        case ModelFamily::RoundSphere:
            return dim_ * (dim_ - 1) / sphere_radius_sq(t);
        case ModelFamily::HyperbolicScaled:
            return -2.0 / hyperbolic_scale(t);
        case ModelFamily::FlatTorus:
            return 0.0;
        case ModelFamily::SphereCircleProduct:
            return 2.0 / sphere_radius_sq(t);
    }
    return 0.0;
}

EinsteinBounds ModelGeometry::einstein_bounds(double t) const {
    require_time(t);
    switch (family_) {
        case ModelFamily::RoundSphere: {
            if (dim_ == 2) return {0.0, 0.0};
            const double e = -(dim_ - 1) * (dim_ - 2) / (2.0 * sphere_radius_sq(t));
            return {e, e};
        }
        case ModelFamily::SphereCircleProduct:
            // E = Ric - (R/2) g vanishes on the sphere block and equals
            // -g/a^2 along the circle direction.
            return {-1.0 / sphere_radius_sq(t), 0.0};
        default:
            return {0.0, 0.0};  // Einstein tensor vanishes identically in 2-D
    }
}

double ModelGeometry::eigenvalue(int mode, double t) const {
    require_time(t);
    if (mode < 1) throw Error("mode indices start at 1 (smallest nonzero eigenvalue)");
    switch (family_) {
        case ModelFamily::RoundSphere:
            return mode * (mode + dim_ - 1.0) / sphere_radius_sq(t);
        case ModelFamily::HyperbolicScaled: {
            if (spectrum_.empty())
                throw UnknownSpectrum("hyperbolic model constructed without an initial spectrum");
            if (mode > static_cast<int>(spectrum_.size()))
                throw Error("mode exceeds the supplied hyperbolic spectrum");
            return spectrum_[mode - 1] * scale_ / hyperbolic_scale(t);
        }
        case ModelFamily::FlatTorus: {
            if (mode > static_cast<int>(torus_ladder_.size()))
                throw Error("mode exceeds the enumerated torus ladder");
            return torus_ladder_[mode - 1];
        }
        case ModelFamily::SphereCircleProduct: {
            const auto [l, mm] = product_mode(mode);
            return l * (l + 1.0) / sphere_radius_sq(t) +
                   static_cast<double>(mm) * mm / (circle_radius_ * circle_radius_);
        }
    }
    return 0.0;
}

std::pair<int, int> ModelGeometry::product_mode(int mode) const {
    if (family_ != ModelFamily::SphereCircleProduct)
        throw Error("product_mode: not a product model");
    if (mode < 1 || mode > static_cast<int>(product_ladder_.size()))
        throw Error("mode outside the enumerated product ladder");
    return product_ladder_[mode - 1];
}

double ModelGeometry::rate_prediction(int mode, double t) const {
    const double mu = eigenvalue(mode, t);
    const double r = scalar_curvature(t);
    switch (family_) {
        case ModelFamily::RoundSphere: {
            // integral(E_ij f_i f_j) = e * integral(|grad f|^2) = e * mu for
            // a constant relative Einstein eigenvalue e.
            const double e = einstein_bounds(t).lambda_min;
            return mu * r + 2.0 * e * mu;
        }
        case ModelFamily::HyperbolicScaled:
            return mu * r;  // 2-D: Einstein tensor vanishes
        case ModelFamily::FlatTorus:
            return 0.0;
        case ModelFamily::SphereCircleProduct: {
            // Only the circle-direction gradient feels E; its share of the
            // Dirichlet energy is m^2 / b0^2.
            const auto [l, mm] = product_mode(mode);
            (void)l;
            const double circle_energy =
                static_cast<double>(mm) * mm / (circle_radius_ * circle_radius_);
            return mu * r - 2.0 / sphere_radius_sq(t) * circle_energy;
        }
    }
    return 0.0;
}

double ModelGeometry::volume_scale(double t) const {
    require_time(t);
    switch (family_) {
        case ModelFamily::RoundSphere:
            return std::pow(sphere_radius_sq(t), dim_ / 2.0);
        case ModelFamily::HyperbolicScaled:
            return hyperbolic_scale(t);
        case ModelFamily::FlatTorus:
            return 1.0;
        case ModelFamily::SphereCircleProduct:
            return sphere_radius_sq(t) * circle_radius_;
    }
    return 1.0;
}

ModelGeometry ModelGeometry::advanced_to(double t) const {
    require_time(t);
    switch (family_) {
        case ModelFamily::RoundSphere:
            return round_sphere(dim_, std::sqrt(sphere_radius_sq(t)));
        case ModelFamily::HyperbolicScaled: {
            std::vector<double> spec = spectrum_;
            const double factor = scale_ / hyperbolic_scale(t);
            for (double& lam : spec) lam *= factor;
            return hyperbolic_scaled(hyperbolic_scale(t), std::move(spec));
        }
        case ModelFamily::FlatTorus:
            return *this;
        case ModelFamily::SphereCircleProduct:
            return sphere_circle_product(std::sqrt(sphere_radius_sq(t)), circle_radius_);
    }
    return *this;
}

}  // namespace rsl
