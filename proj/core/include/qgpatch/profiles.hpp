#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qgpatch::profiles {

enum class ProfileKind { ellipsoid, sphere, tabulated };

// Generating curve r0(phi) of an axisymmetric surface, phi in [0, pi].
// The surface is (r0(phi) e^{i theta}, d cos phi).
class RevolutionProfile {
public:
    static RevolutionProfile ellipsoid(double a);
    static RevolutionProfile sphere(double radius);
    // Samples (phi, r) with phi strictly increasing in [0, pi]. Endpoint
    // values are clamped to zero; monotone cubic (Fritsch-Carlson) in between.
    static RevolutionProfile tabulated(std::vector<std::pair<double, double>> samples);
    static RevolutionProfile from_csv(const std::string& path);

    ProfileKind kind() const { return kind_; }
    // Equatorial radius a for ellipsoid/sphere presets.
    double radius() const { return a_; }

    double r(double phi) const;
    double dr(double phi) const;
    // r(phi + delta) - r(phi), accurate for tiny delta.
    double increment(double phi, double delta) const;

private:
    struct Table {
        std::vector<double> x, y, m;
    };
    ProfileKind kind_ = ProfileKind::sphere;
    double a_ = 1.0;
    std::shared_ptr<const Table> table_;
};

struct HypothesisReport {
    double chord_constant_C = 0.0;
    double separation_delta = 0.0;
    double interaction_bound_delta_bar = 0.0;
    double symmetry_defect = 0.0;
    double regularity_defect = 0.0;
    double min_interior_ratio = 0.0;  // min r0/sin over interior validation nodes
    bool passed = false;
    std::string failure;  // empty when passed
};

struct PatchPairConfig {
    double d1 = 2.0;
    double d2 = 1.0;
    RevolutionProfile outer = RevolutionProfile::sphere(1.0);
    RevolutionProfile inner = RevolutionProfile::sphere(1.0);
    HypothesisReport validated;

    const RevolutionProfile& profile(int i) const { return i == 1 ? outer : inner; }
    double d(int i) const { return i == 1 ? d1 : d2; }
    // True for the outer-ellipsoid / inner-sphere family with closed forms.
    bool is_ellipsoid_sphere() const;
};

HypothesisReport validate_hypotheses(const PatchPairConfig& config, int grid_size = 512);

// Validates and throws HypothesisViolation on failure.
PatchPairConfig make_config(double d1, double d2, RevolutionProfile outer, RevolutionProfile inner,
                            int grid_size = 512);

// Outer ellipsoid with semiaxes (a, a, d1), inner sphere of radius d2.
PatchPairConfig make_ellipsoid_sphere_config(double a, double d1, double d2);

}  // namespace qgpatch::profiles
