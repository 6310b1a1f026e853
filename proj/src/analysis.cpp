#include "cvdshift/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cvdshift {

Jnd perceived_difference(const LinearRgb& a, const LinearRgb& b, CvdType t, const RotationTransform& rotation)
{
    const auto pa = simulate_dichromat(clip_to_gamut(rotation.apply(a)), t);
    const auto pb = simulate_dichromat(clip_to_gamut(rotation.apply(b)), t);
    return delta_e_to_jnd(delta_e76(pa, pb));
}

std::vector<double> angle_grid(double angle_step_deg)
{
    if (!(angle_step_deg > 0.0) || angle_step_deg > 360.0)
        throw std::invalid_argument("angle step must be in (0, 360] degrees");
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double deg = k * angle_step_deg;
        if (deg >= 360.0 - 1e-9)
            break;
        grid.push_back(deg);
    }
    return grid;
}

DiscriminabilityCurve discriminability_curve(const LinearRgb& first, const LinearRgb& second, CvdType t,
                                             double angle_step_deg)
{
    DiscriminabilityCurve curve{first, second, {}};
    const auto grid = angle_grid(angle_step_deg);
    curve.samples.reserve(grid.size());
    for (double deg : grid) {
        const auto rot = rotation_matrix(RotationAngle::degrees(deg));
        curve.samples.push_back({deg, perceived_difference(first, second, t, rot)});
    }
    return curve;
}

std::vector<DiscriminabilityCurve> discriminability_curves(const LinearRgb& base, CvdType t, double spacing,
                                                           int count, double angle_step_deg)
{
    const auto colors = sample_confusion_line(base, t, spacing, count);
    std::vector<DiscriminabilityCurve> curves;
    curves.reserve(colors.size() - 1);
    for (std::size_t i = 0; i + 1 < colors.size(); ++i)
        curves.push_back(discriminability_curve(colors[i], colors[i + 1], t, angle_step_deg));
    return curves;
}

PeakDiscriminability max_discriminability(const DiscriminabilityCurve& curve)
{
    if (curve.samples.empty())
        throw std::invalid_argument("max_discriminability: empty curve");
    const DiscriminabilitySample* best = &curve.samples.front();
    for (const auto& s : curve.samples)
        if (s.jnd.value > best->jnd.value || (s.jnd.value == best->jnd.value && s.theta_deg < best->theta_deg))
            best = &s;
    return {best->theta_deg, best->jnd};
}

ThresholdEllipse fit_ellipse(std::span<const XyChromaticity> points)
{
    if (points.size() < 5)
        throw FitError("fit_ellipse: need at least 5 points, got " + std::to_string(points.size()));

    // Center and scale so the normal equations stay well conditioned at xy magnitudes.
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : points)
        mean += Eigen::Vector2d(p.x, p.y);
    mean /= static_cast<double>(n);

    Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
    for (const auto& p : points) {
        const Eigen::Vector2d d(p.x - mean.x(), p.y - mean.y());
        scatter += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> spread(scatter);
    const double largest = spread.eigenvalues()(1);
    if (!(largest > 0.0) || spread.eigenvalues()(0) <= 1e-12 * largest)
        throw FitError("fit_ellipse: points are collinear");
    const double scale = std::sqrt(scatter.trace() / static_cast<double>(n));

    Eigen::MatrixXd quad(n, 3);
    Eigen::MatrixXd lin(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        const double x = (p.x - mean.x()) / scale;
        const double y = (p.y - mean.y()) / scale;
        quad.row(i) << x * x, x * y, y * y;
        lin.row(i) << x, y, 1.0;
    }
    const Eigen::Matrix3d s1 = quad.transpose() * quad;
    const Eigen::Matrix3d s2 = quad.transpose() * lin;
    const Eigen::Matrix3d s3 = lin.transpose() * lin;
    const Eigen::FullPivLU<Eigen::Matrix3d> s3_lu(s3);
    if (!s3_lu.isInvertible())
        throw FitError("fit_ellipse: degenerate point set");
    const Eigen::Matrix3d t = -s3_lu.solve(s2.transpose());
    const Eigen::Matrix3d reduced = s1 + s2 * t;
    Eigen::Matrix3d constrained;
    constrained.row(0) = reduced.row(2) / 2.0;
    constrained.row(1) = -reduced.row(1);
    constrained.row(2) = reduced.row(0) / 2.0;

    const Eigen::EigenSolver<Eigen::Matrix3d> eig(constrained);
    const Eigen::Matrix3d vecs = eig.eigenvectors().real();
    int pick = -1;
    double best_cond = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d v = vecs.col(k);
        const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
        if (cond > best_cond) {
            best_cond = cond;
            pick = k;
        }
    }
    if (pick < 0)
        throw FitError("fit_ellipse: no elliptical conic fits the points");

    const Eigen::Vector3d a1 = vecs.col(pick);
    const Eigen::Vector3d a2 = t * a1;
    const double A = a1(0), B = a1(1), C = a1(2), D = a2(0), E = a2(1), F = a2(2);

    const double den = B * B - 4.0 * A * C;
    if (!(den < 0.0))
        throw FitError("fit_ellipse: fitted conic is not an ellipse");
    const double cx = (2.0 * C * D - B * E) / den;
    const double cy = (2.0 * A * E - B * D) / den;
    const double at_center = A * cx * cx + B * cx * cy + C * cy * cy + D * cx + E * cy + F;

    Eigen::Matrix2d form;
    form << A, B / 2.0, B / 2.0, C;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> axes(form);
    const double l0 = axes.eigenvalues()(0);
    const double l1 = axes.eigenvalues()(1);
    const double r0 = -at_center / l0;
    const double r1 = -at_center / l1;
    if (!(r0 > 0.0) || !(r1 > 0.0))
        throw FitError("fit_ellipse: fitted conic is imaginary");

    // Larger radius belongs to the eigenvalue of smaller magnitude.
    double semi_major = std::sqrt(r0);
    double semi_minor = std::sqrt(r1);
    Eigen::Vector2d major_dir = axes.eigenvectors().col(0);
    if (semi_minor > semi_major) {
        std::swap(semi_major, semi_minor);
        major_dir = axes.eigenvectors().col(1);
    }
    double orientation = std::atan2(major_dir.y(), major_dir.x());
    orientation = std::fmod(orientation, std::numbers::pi);
    if (orientation < 0.0)
        orientation += std::numbers::pi;
    if (orientation >= std::numbers::pi || semi_major - semi_minor <= 1e-9 * semi_major)
        orientation = 0.0;

    ThresholdEllipse e;
    e.center = {mean.x() + scale * cx, mean.y() + scale * cy};
    e.semi_major = scale * semi_major;
    e.semi_minor = scale * semi_minor;
    e.orientation = orientation;
    return e;
}

double ellipse_area(const ThresholdEllipse& e) { return std::numbers::pi * e.semi_major * e.semi_minor; }

XyChromaticity ellipse_point(const ThresholdEllipse& e, double t)
{
    const double c = std::cos(e.orientation);
    const double s = std::sin(e.orientation);
    const double u = e.semi_major * std::cos(t);
    const double v = e.semi_minor * std::sin(t);
    return {e.center.x + u * c - v * s, e.center.y + u * s + v * c};
}

}  // namespace cvdshift
