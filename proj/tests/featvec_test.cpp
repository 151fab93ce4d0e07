#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "moodpipe/featvec.hpp"
#include "moodpipe/pipeline.hpp"
#include "moodpipe/synthface.hpp"

using namespace moodpipe;

namespace {

void fill_rect(BinaryMask& m, int x1, int y1, int x2, int y2) {
    for (int y = y1; y <= y2; ++y) {
        for (int x = x1; x <= x2; ++x) m.set(x, y);
    }
}

FeatureMasks box_masks() {
    FeatureMasks fm;
    fm.left_eyebrow = fm.right_eyebrow = fm.lip = BinaryMask(100, 100);
    fill_rect(fm.left_eyebrow, 15, 25, 40, 28);
    fill_rect(fm.right_eyebrow, 60, 25, 85, 28);
    fill_rect(fm.lip, 30, 78, 70, 83);
    fm.nose_y = 58;
    fm.lip_left_corner = {29.5, 83};
    fm.lip_right_corner = {70.5, 83};
    fm.lip_top_mid = {50, 77.5};
    fm.lip_bottom_mid = {50, 83.5};
    return fm;
}

RasterImage pad_and_shift(const RasterImage& img, int dx, int dy, Rgb bg) {
    RasterImage out(img.width() + 40, img.height() + 40, bg);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) out.set_rgb(x + dx, y + dy, img.rgb(x, y));
    }
    return out;
}

FeatureVector features_of(const RasterImage& img) { return analyze_image(img, PipelineConfig{}).features; }

double rel(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST(FeatureVector, HandBuiltMasks) {
    const FeatureMasks fm = box_masks();
    const auto f = compute_feature_vector(fm, Rect{0, 0, 99, 99});
    // brow centroids at y 26.5, midpoint x 50: He = (58 - 26.5) / 100
    EXPECT_NEAR(f.he(), 0.315, 1e-12);
    // inner ends: x 40.5 and 59.5
    EXPECT_NEAR(f.we(), 0.19, 1e-12);
    EXPECT_NEAR(f.hm(), 0.06, 1e-12);
    EXPECT_NEAR(f.wm(), 0.41, 1e-12);
    EXPECT_EQ(f.rul(), 0.0);
    EXPECT_EQ(f.rll(), 0.0);
    EXPECT_NEAR(f.nl(), 0.195, 1e-12);
}

TEST(FeatureVector, FlatLipHasZeroCurvature) {
    FeatureMasks fm = box_masks();
    fm.lip = BinaryMask(100, 100);
    fill_rect(fm.lip, 20, 80, 80, 80);
    const auto f = compute_feature_vector(fm, Rect{0, 0, 99, 99});
    EXPECT_EQ(f.rul(), 0.0);
    EXPECT_EQ(f.rll(), 0.0);
}

TEST(FeatureVector, ParabolicLipCurvatureSign) {
    // upper boundary row = 80 - round(0.01 u^2): corners higher than the middle
    FeatureMasks fm = box_masks();
    fm.lip = BinaryMask(100, 100);
    for (int x = 30; x <= 70; ++x) {
        const double u = x - 50;
        const int top = 80 - static_cast<int>(std::lround(0.01 * u * u));
        for (int y = top; y <= top + 3; ++y) fm.lip.set(x, y);
    }
    const auto f = compute_feature_vector(fm, Rect{0, 0, 99, 99});
    EXPECT_GT(f.rul(), 0.0);
    EXPECT_LT(f.rll(), 0.0);  // the lower boundary bends the same way
    // the corner points sit on the lowest pixel of the end columns, which steepens the fit a little
    EXPECT_NEAR(f.rul(), 2.0 * 0.01 * 100, 0.25);
}

TEST(FeatureVector, QuadraticFitOracle) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        const double a = d(rng), b = d(rng), c = d(rng);
        std::vector<Point2d> pts;
        for (int u = -10; u <= 10; ++u) pts.push_back({static_cast<double>(u), a * u * u + b * u + c});
        EXPECT_NEAR(detail::quadratic_leading_coeff(pts), a, 1e-9);
    }
}

TEST(FeatureVector, MissingFeature) {
    FeatureMasks fm = box_masks();
    fm.right_eyebrow = BinaryMask(100, 100);
    try {
        compute_feature_vector(fm, Rect{0, 0, 99, 99});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingFeature);
        EXPECT_EQ(e.detail(), "right_eyebrow");
    }
}

TEST(FeatureVector, DegenerateCurvature) {
    FeatureMasks fm = box_masks();
    fm.lip = BinaryMask(100, 100);
    fm.lip.set(50, 80);
    fm.lip.set(51, 81);
    try {
        compute_feature_vector(fm, Rect{0, 0, 99, 99});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateCurvature);
    }
}

TEST(FeatureVector, SurpriseExceedsNeutral) {
    const auto n = features_of(render_face(neutral_params()).first);
    const auto s = features_of(render_face(expression_preset(Expression::Surprise, 0.0, 1)).first);
    EXPECT_GT(s.he(), n.he());
    EXPECT_GT(s.hm(), n.hm());
}

TEST(FeatureVector, PresetOrderingAtZeroJitter) {
    std::array<FeatureVector, kExpressionCount> f;
    for (Expression e : kAllExpressions) f[index_of(e)] = features_of(render_face(expression_preset(e, 0.0, 0)).first);
    const auto sur = f[index_of(Expression::Surprise)];
    const auto joy = f[index_of(Expression::Joy)];
    for (Expression e : kAllExpressions) {
        if (e != Expression::Surprise) {
            EXPECT_GT(sur.hm(), f[index_of(e)].hm()) << name_of(e);
            EXPECT_GT(sur.he(), f[index_of(e)].he()) << name_of(e);
        }
        if (e != Expression::Joy) {
            EXPECT_GT(joy.rul(), f[index_of(e)].rul()) << name_of(e);
        }
    }
}

TEST(FeatureVector, ValuesFiniteAndLengthsNonNegative) {
    for (int i = 0; i < 24; ++i) {
        const auto p = expression_preset(kAllExpressions[i % 6], 0.2, derive_seed(8, i));
        const auto f = features_of(render_face(p).first);
        for (double v : f.values) EXPECT_TRUE(std::isfinite(v));
        for (int k : {0, 1, 2, 3, 6}) EXPECT_GE(f.values[k], 0.0);
    }
}

TEST(FeatureVector, ScaleInvariance) {
    for (int i = 0; i < 12; ++i) {
        const auto p = expression_preset(kAllExpressions[i % 6], 0.15, derive_seed(99, i));
        const auto img = render_face(p).first;
        const auto a = features_of(img);
        const auto b = features_of(upscale_nearest(img, 2));
        for (int k = 0; k < kFeatureDim; ++k) EXPECT_LE(rel(a.values[k], b.values[k]), 0.05) << i << kFeatureNames[k];
    }
}

TEST(FeatureVector, TranslationBitExact) {
    for (int i = 0; i < 6; ++i) {
        const auto p = expression_preset(kAllExpressions[i], 0.15, derive_seed(5, i));
        const auto img = render_face(p).first;
        EXPECT_EQ(features_of(img), features_of(pad_and_shift(img, 17, 9, p.background)));
    }
}

TEST(FeatureVector, MirrorSymmetry) {
    for (int i = 0; i < 12; ++i) {
        const auto p = expression_preset(kAllExpressions[i % 6], 0.15, derive_seed(12, i));
        const auto img = render_face(p).first;
        const auto a = features_of(img);
        const auto m = features_of(mirror_horizontal(img));
        for (int k = 0; k < kFeatureDim; ++k) EXPECT_LE(rel(a.values[k], m.values[k]), 0.02) << i << kFeatureNames[k];
    }
}
