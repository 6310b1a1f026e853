#include "cvdshift/cvd_sim.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace cvdshift;
using testing_support::Gen;

namespace {

double simulated_distance(const LinearRgb& a, const LinearRgb& b, CvdType t)
{
    return delta_e76(simulate_dichromat(a, t), simulate_dichromat(b, t));
}

Eigen::Vector3d lms_vec(const Lms& c) { return {c.l, c.m, c.s}; }

/// True when q = alpha * white + beta * anchor with beta >= 0, i.e. q lies on
/// the half-plane bounded by the neutral axis that contains the anchor.
bool on_half_plane(const Eigen::Vector3d& q, const Eigen::Vector3d& anchor)
{
    Eigen::Matrix<double, 3, 2> basis;
    basis.col(0) = Eigen::Vector3d::Ones();
    basis.col(1) = anchor;
    const Eigen::Vector2d coef = basis.colPivHouseholderQr().solve(q);
    const double residual = (basis * coef - q).norm();
    return residual < 1e-9 * std::max(1.0, q.norm()) && coef(1) >= -1e-9;
}

}  // namespace

TEST(CvdType, ParsingAndNames)
{
    EXPECT_EQ(parse_cvd_type("protan"), CvdType::Protan);
    EXPECT_EQ(parse_cvd_type("Deuteranopia"), CvdType::Deutan);
    EXPECT_EQ(parse_cvd_type("tritanope"), CvdType::Tritan);
    EXPECT_THROW(parse_cvd_type("achromat"), std::invalid_argument);
    EXPECT_THROW(parse_cvd_type(""), std::invalid_argument);
    for (auto t : kAllCvdTypes)
        EXPECT_EQ(parse_cvd_type(to_string(t)), t);
    EXPECT_EQ(missing_cone(CvdType::Protan), 0);
    EXPECT_EQ(missing_cone(CvdType::Deutan), 1);
    EXPECT_EQ(missing_cone(CvdType::Tritan), 2);
}

TEST(SpectralTable, CoversVisibleRangeInFiveNanometerSteps)
{
    const auto table = cie1931_table();
    ASSERT_EQ(table.size(), 81u);
    EXPECT_EQ(table.front().wavelength_nm, 380.0);
    EXPECT_EQ(table.back().wavelength_nm, 780.0);
    for (std::size_t i = 1; i < table.size(); ++i)
        EXPECT_DOUBLE_EQ(table[i].wavelength_nm - table[i - 1].wavelength_nm, 5.0);
    EXPECT_THROW(spectral_xyz(379.0), std::out_of_range);
    EXPECT_THROW(spectral_xyz(781.0), std::out_of_range);
}

TEST(SpectralTable, InterpolatesLinearlyBetweenRows)
{
    const auto a = spectral_xyz(570.0);
    const auto b = spectral_xyz(575.0);
    const auto mid = spectral_xyz(572.5);
    EXPECT_NEAR(mid.x, 0.5 * (a.x + b.x), 1e-12);
    EXPECT_NEAR(mid.y, 0.5 * (a.y + b.y), 1e-12);
    EXPECT_NEAR(mid.z, 0.5 * (a.z + b.z), 1e-12);
}

TEST(IsochromeAnchors, WavelengthsAndChromaticities)
{
    const auto p = isochrome_anchors(CvdType::Protan);
    const auto d = isochrome_anchors(CvdType::Deutan);
    const auto t = isochrome_anchors(CvdType::Tritan);
    EXPECT_EQ(d.wavelength_nm[0], 475.0);
    EXPECT_EQ(d.wavelength_nm[1], 575.0);
    EXPECT_EQ(p.wavelength_nm, d.wavelength_nm);
    EXPECT_EQ(t.wavelength_nm[0], 485.0);
    EXPECT_EQ(t.wavelength_nm[1], 660.0);
    EXPECT_NEAR(d.xy[1].x, 0.4788, 2e-3);
    EXPECT_NEAR(d.xy[1].y, 0.5202, 2e-3);
    for (const auto& a : {p, d, t}) {
        EXPECT_LE(a.xy[0].x + a.xy[0].y, 1.0 + 1e-12);
        EXPECT_LE(a.xy[1].x + a.xy[1].y, 1.0 + 1e-12);
        EXPECT_GT(std::hypot(a.xy[0].x - a.xy[1].x, a.xy[0].y - a.xy[1].y), 0.1);
    }
}

TEST(CopunctalPoint, MatchesLiteratureValues)
{
    const auto p = copunctal_point(CvdType::Protan);
    const auto d = copunctal_point(CvdType::Deutan);
    const auto t = copunctal_point(CvdType::Tritan);
    EXPECT_NEAR(p.x, 0.7465, 1e-3);
    EXPECT_NEAR(p.y, 0.2535, 1e-3);
    EXPECT_NEAR(d.x, 1.4000, 1e-3);
    EXPECT_NEAR(d.y, -0.4000, 1e-3);
    EXPECT_NEAR(t.x, 0.1748, 1e-3);
    EXPECT_NEAR(t.y, 0.0000, 1e-3);
    EXPECT_GT(d.x + d.y, 0.99);
    EXPECT_GT(std::hypot(p.x - d.x, p.y - d.y), 0.1);
    EXPECT_GT(std::hypot(p.x - t.x, p.y - t.y), 0.1);
    EXPECT_GT(std::hypot(d.x - t.x, d.y - t.y), 0.1);
}

TEST(ConfusionAxis, ChangesOnlyTheMissingCone)
{
    for (auto t : kAllCvdTypes) {
        const auto lms = linear_to_lms(confusion_axis(t));
        const double v[3] = {lms.l, lms.m, lms.s};
        for (int k = 0; k < 3; ++k)
            if (k != missing_cone(t))
                EXPECT_NEAR(v[k], 0.0, 1e-12);
        EXPECT_GT(std::abs(v[missing_cone(t)]), 0.1);
    }
}

TEST(SimulateDichromat, WhiteIsPreserved)
{
    for (auto t : kAllCvdTypes) {
        const auto w = simulate_dichromat({1, 1, 1}, t);
        EXPECT_NEAR(w.r, 1.0, 1e-3);
        EXPECT_NEAR(w.g, 1.0, 1e-3);
        EXPECT_NEAR(w.b, 1.0, 1e-3);
    }
}

TEST(SimulateDichromat, IdempotentProperty)
{
    Gen gen(201);
    for (auto t : kAllCvdTypes)
        for (int i = 0; i < 1000; ++i) {
            const auto c = gen.linear_rgb();
            const auto once = simulate_dichromat(c, t);
            const auto twice = simulate_dichromat(once, t);
            EXPECT_NEAR(twice.r, once.r, 1e-6);
            EXPECT_NEAR(twice.g, once.g, 1e-6);
            EXPECT_NEAR(twice.b, once.b, 1e-6);
        }
}

TEST(SimulateDichromat, NeutralPreservationProperty)
{
    Gen gen(202);
    for (auto t : kAllCvdTypes)
        for (int i = 0; i < 200; ++i) {
            const double v = gen.uniform(0.0, 1.0);
            EXPECT_LE(delta_e76(simulate_dichromat({v, v, v}, t), LinearRgb{v, v, v}), 1.0);
        }
}

TEST(SimulateDichromat, OutputIsClippedToGamut)
{
    Gen gen(203);
    for (auto t : kAllCvdTypes)
        for (int i = 0; i < 500; ++i)
            EXPECT_TRUE(in_gamut(simulate_dichromat(gen.linear_rgb(), t)));
}

TEST(ProjectToDichromat, LandsOnTheAnchorHalfPlaneProperty)
{
    Gen gen(204);
    for (auto t : kAllCvdTypes) {
        const auto anchors = isochrome_anchors(t);
        const Eigen::Vector3d a0 = lms_vec(xyz_to_lms(spectral_xyz(anchors.wavelength_nm[0])));
        const Eigen::Vector3d a1 = lms_vec(xyz_to_lms(spectral_xyz(anchors.wavelength_nm[1])));
        const int k = missing_cone(t);
        for (int i = 0; i < 1000; ++i) {
            const auto c = linear_to_lms(gen.linear_rgb());
            const auto p = project_to_dichromat(c, t);
            const Eigen::Vector3d q = lms_vec(p);
            const Eigen::Vector3d in = lms_vec(c);
            for (int j = 0; j < 3; ++j)
                if (j != k)
                    EXPECT_DOUBLE_EQ(q(j), in(j));
            EXPECT_TRUE(on_half_plane(q, a0) || on_half_plane(q, a1)) << to_string(t) << " sample " << i;
        }
    }
}

TEST(ProjectToDichromat, ReDerivedMissingConeMatches)
{
    // Solve the plane through white and the chosen anchor for the missing coordinate.
    Gen gen(205);
    for (auto t : kAllCvdTypes) {
        const auto anchors = isochrome_anchors(t);
        const int k = missing_cone(t);
        for (int i = 0; i < 300; ++i) {
            const Eigen::Vector3d c = lms_vec(linear_to_lms(gen.linear_rgb()));
            const Eigen::Vector3d p = lms_vec(project_to_dichromat({c(0), c(1), c(2)}, t));
            bool matched = false;
            for (int a = 0; a < 2; ++a) {
                const Eigen::Vector3d anchor = lms_vec(xyz_to_lms(spectral_xyz(anchors.wavelength_nm[a])));
                const Eigen::Vector3d n = Eigen::Vector3d::Ones().cross(anchor);
                Eigen::Vector3d q = c;
                q(k) = 0.0;
                q(k) = -n.dot(q) / n(k);
                if (std::abs(q(k) - p(k)) < 1e-6 && on_half_plane(q, anchor))
                    matched = true;
            }
            EXPECT_TRUE(matched) << to_string(t) << " sample " << i;
        }
    }
}

TEST(ConfusionLine, GrayProtanDirectionPointsAtCopunctal)
{
    const auto gray = srgb_decode({136, 136, 136});
    const auto line = confusion_line(gray, CvdType::Protan);
    const auto base = linear_to_xy(gray);
    const double dx = 0.74649 - base.x, dy = 0.25351 - base.y;
    const double len = std::hypot(dx, dy);
    EXPECT_NEAR(std::hypot(line.direction.x, line.direction.y), 1.0, 1e-12);
    EXPECT_NEAR(line.direction.x, dx / len, 1e-4);
    EXPECT_NEAR(line.direction.y, dy / len, 1e-4);
    const auto cp = copunctal_point(CvdType::Protan);
    const double ex = cp.x - base.x, ey = cp.y - base.y;
    EXPECT_NEAR(line.direction.x, ex / std::hypot(ex, ey), 1e-12);
}

TEST(ConfusionLine, SampledPointsAreCollinearWithCopunctalProperty)
{
    Gen gen(206);
    for (auto t : kAllCvdTypes)
        for (int i = 0; i < 100; ++i) {
            const auto line = confusion_line(gen.linear_rgb(0.05, 1.0), t);
            const double s = gen.uniform(-0.2, 0.2), u = gen.uniform(-0.2, 0.2);
            const auto p = line.at(s), q = line.at(u);
            const double cross = (q.x - p.x) * (line.copunctal.y - p.y) - (q.y - p.y) * (line.copunctal.x - p.x);
            EXPECT_LT(std::abs(cross), 1e-9);
        }
}

TEST(ConfusionLine, DegenerateBasesThrow)
{
    EXPECT_THROW(confusion_line({0, 0, 0}, CvdType::Protan), std::domain_error);
    const auto axis = confusion_axis(CvdType::Protan);
    const double s = 1.0 / std::max({std::abs(axis.r), std::abs(axis.g), std::abs(axis.b)});
    EXPECT_THROW(confusion_line({axis.r * s, axis.g * s, axis.b * s}, CvdType::Protan), std::domain_error);
}

TEST(SampleConfusionLine, ThirteenGrayProtanSamplesAtFiveDeltaE)
{
    const auto gray = srgb_decode({136, 136, 136});
    const auto samples = sample_confusion_line(gray, CvdType::Protan, 5.0, 13);
    ASSERT_EQ(samples.size(), 13u);
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double d = delta_e76(samples[i], samples[i + 1]);
        EXPECT_GE(d, 4.75);
        EXPECT_LE(d, 5.25);
    }
    EXPECT_EQ(samples[6], gray);
    const auto line = confusion_line(gray, CvdType::Protan);
    for (const auto& s : samples) {
        EXPECT_TRUE(in_gamut(s));
        const auto xy = linear_to_xy(s);
        const double cross = (xy.x - line.base.x) * line.direction.y - (xy.y - line.base.y) * line.direction.x;
        EXPECT_LT(std::abs(cross), 1e-9);
        EXPECT_LE(simulated_distance(s, gray, CvdType::Protan), 1.0);
    }
}

TEST(SampleConfusionLine, TwoSamplesStraddleBase)
{
    const auto gray = srgb_decode({136, 136, 136});
    for (auto t : kAllCvdTypes) {
        const auto s = sample_confusion_line(gray, t, 4.0, 2);
        ASSERT_EQ(s.size(), 2u);
        EXPECT_NEAR(delta_e76(s[0], s[1]), 4.0, 0.25);
        EXPECT_NEAR(delta_e76(s[0], gray), delta_e76(s[1], gray), 0.25);
    }
}

TEST(SampleConfusionLine, DeutanPairTenDeltaEApartCollapses)
{
    const auto gray = srgb_decode({136, 136, 136});
    const auto s = sample_confusion_line(gray, CvdType::Deutan, 10.0, 3);
    EXPECT_NEAR(delta_e76(s[0], s[2]) / 2.0, 10.0, 0.25);
    EXPECT_LE(simulated_distance(s[0], s[2], CvdType::Deutan), 1.0);
}

TEST(SampleConfusionLine, CollapseProperty)
{
    Gen gen(207);
    for (auto t : kAllCvdTypes) {
        int checked = 0;
        while (checked < 100) {
            const auto base = gen.linear_rgb(0.15, 0.85);
            std::vector<LinearRgb> s;
            try {
                s = sample_confusion_line(base, t, 3.0, 5);
            } catch (const GamutError&) {
                continue;
            }
            ++checked;
            for (const auto& a : s)
                for (const auto& b : s)
                    EXPECT_LE(simulated_distance(a, b, t), 1.0);
        }
    }
}

TEST(SampleConfusionLine, GamutErrorReportsAchievableCount)
{
    const auto red = srgb_decode({184, 74, 74});
    try {
        sample_confusion_line(red, CvdType::Deutan, 5.0, 400);
        FAIL() << "expected GamutError";
    } catch (const GamutError& e) {
        EXPECT_GE(e.achievable(), 2);
        EXPECT_LT(e.achievable(), 400);
        EXPECT_NE(std::string(e.what()).find(std::to_string(e.achievable())), std::string::npos);
        EXPECT_NO_THROW(sample_confusion_line(red, CvdType::Deutan, 5.0, e.achievable()));
    }
}

TEST(SampleConfusionLine, RejectsBadArguments)
{
    const LinearRgb gray{0.3, 0.3, 0.3};
    EXPECT_THROW(sample_confusion_line(gray, CvdType::Protan, 5.0, 1), std::invalid_argument);
    EXPECT_THROW(sample_confusion_line(gray, CvdType::Protan, 0.0, 5), std::invalid_argument);
    EXPECT_THROW(sample_confusion_line(gray, CvdType::Protan, -1.0, 5), std::invalid_argument);
}

TEST(SimulateImage, GrayscaleWithinOneCodeAndIdempotent)
{
    Image img(32, 8);
    for (int x = 0; x < 32; ++x)
        for (int y = 0; y < 8; ++y) {
            const auto v = static_cast<std::uint8_t>(x * 8 + y);
            img.set_pixel(x, y, {v, v, v});
        }
    for (auto t : kAllCvdTypes) {
        const auto once = simulate_image(img, t);
        for (std::size_t i = 0; i < img.bytes().size(); ++i)
            EXPECT_LE(std::abs(int(once.bytes()[i]) - int(img.bytes()[i])), 1);
        const auto twice = simulate_image(once, t);
        for (std::size_t i = 0; i < img.bytes().size(); ++i)
            EXPECT_LE(std::abs(int(twice.bytes()[i]) - int(once.bytes()[i])), 1);
    }
}

TEST(SimulateImage, MatchesPerPixelPipelineAndKeepsAlpha)
{
    Gen gen(208);
    Image img(40, 40, 4);
    for (auto& b : img.bytes())
        b = static_cast<std::uint8_t>(gen.integer(0, 255));
    for (auto t : kAllCvdTypes) {
        const auto once = simulate_image(img, t);
        for (int y = 0; y < 40; ++y)
            for (int x = 0; x < 40; ++x) {
                const auto expect = srgb_encode(simulate_dichromat(srgb_decode(img.pixel(x, y)), t));
                EXPECT_EQ(once.pixel(x, y), expect);
                EXPECT_EQ(once.alpha(x, y), img.alpha(x, y));
            }
    }
}

TEST(SimulateImage, RequantizedSecondPassDriftsLessThanThreeDeltaE)
{
    // 8-bit codes fall slightly off the dichromat surface, so a second pass
    // is not bit-exact; it must stay perceptually close.
    Gen gen(209);
    Image img(64, 64, 3);
    for (auto& b : img.bytes())
        b = static_cast<std::uint8_t>(gen.integer(0, 255));
    for (auto t : kAllCvdTypes) {
        const auto once = simulate_image(img, t);
        const auto twice = simulate_image(once, t);
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x)
                EXPECT_LT(delta_e76(srgb_decode(once.pixel(x, y)), srgb_decode(twice.pixel(x, y))), 3.0);
    }
}
