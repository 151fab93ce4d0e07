#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "moodpipe/featextract.hpp"
#include "moodpipe/pipeline.hpp"
#include "moodpipe/synthface.hpp"

using namespace moodpipe;

namespace {

FeatureId expect_not_found(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::FeatureNotFound);
        if (e.detail() == "left_eyebrow") return FeatureId::LeftEyebrow;
        if (e.detail() == "right_eyebrow") return FeatureId::RightEyebrow;
        if (e.detail() == "lip") return FeatureId::Lip;
        if (e.detail() == "nose") return FeatureId::Nose;
        ADD_FAILURE() << "unexpected detail " << e.detail();
        return FeatureId::Nose;
    }
    ADD_FAILURE() << "expected FeatureNotFound";
    return FeatureId::Nose;
}

// Two-row horizontal line of height v starting at row y.
EdgeMap line_map(int w, int h, int y, double v = 100.0) {
    EdgeMap e(w, h, 0.0);
    for (int x = 0; x < w; ++x) {
        e(x, y) = v;
        if (y + 1 < h) e(x, y + 1) = v;
    }
    return e;
}

void fill_rect(GrayImage& g, int x1, int y1, int x2, int y2, std::uint8_t v) {
    for (int y = y1; y <= y2; ++y) {
        for (int x = x1; x <= x2; ++x) g(x, y) = v;
    }
}

GrayImage truth_crop(const RasterImage& img, const SynthFaceTruth& t) {
    return prepare_face_crop(to_grayscale(img), t.head, t.bbox);
}

}  // namespace

// --- anthropometric boxes --------------------------------------------------

TEST(Anthropometric, UnitMapping) {
    AnthropometricModel m;
    m.left_eyebrow = {0.1, 0.15, 0.9, 0.5, 0.3};
    EXPECT_EQ(anthropometric_box(Rect{0, 0, 99, 99}, FeatureId::LeftEyebrow, m), (Rect{10, 15, 89, 49}));
}

TEST(Anthropometric, DefaultBoxesOrdered) {
    const AnthropometricModel m;
    std::mt19937 rng(3);
    for (int t = 0; t < 30; ++t) {
        const int x1 = rng() % 50, y1 = rng() % 50;
        const int w = 32 + rng() % 200, h = 32 + rng() % 200;
        const Rect bb{x1, y1, x1 + w - 1, y1 + h - 1};
        const double mid = 0.5 * (bb.y1 + bb.y2);
        const Rect lb = anthropometric_box(bb, FeatureId::LeftEyebrow, m);
        const Rect rb = anthropometric_box(bb, FeatureId::RightEyebrow, m);
        const Rect nb = anthropometric_box(bb, FeatureId::Nose, m);
        const Rect lip = anthropometric_box(bb, FeatureId::Lip, m);
        EXPECT_LT(lb.y1, mid);
        EXPECT_LE(lb.y2, mid);
        EXPECT_GE(nb.y1, std::max(lb.y2, rb.y2));
        EXPECT_LE(nb.y1, lip.y1);
        for (const Rect& r : {lb, rb, nb, lip}) EXPECT_EQ(intersect(r, bb), r);
    }
}

TEST(Anthropometric, FaceTooSmall) {
    try {
        anthropometric_box(Rect{0, 0, 30, 99}, FeatureId::Lip, AnthropometricModel{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::FaceTooSmall);
    }
}

TEST(Anthropometric, ModelValidation) {
    AnthropometricModel m;
    m.left_eyebrow.y2f = 0.6;
    EXPECT_THROW(m.validate(), Error);
    m = AnthropometricModel{};
    m.nose.y1f = 0.3;
    EXPECT_THROW(m.validate(), Error);
    EXPECT_NO_THROW(AnthropometricModel{}.validate());
}

// --- band location ---------------------------------------------------------

TEST(Band, SingleLineOwnsItsBand) {
    BandParams bp;
    bp.n_regions = 4;
    const Rect search{0, 0, 19, 99};
    const auto loc = locate_feature_band(line_map(20, 100, 61), search, bp, 0.5);
    EXPECT_EQ(loc.winner.index, 2);
    EXPECT_DOUBLE_EQ(loc.scores[2].e, 1.0);
    EXPECT_EQ(loc.winner.band, (Rect{0, 50, 19, 74}));
}

TEST(Band, ZeroMapHasNoEvidence) {
    try {
        locate_feature_band(EdgeMap(10, 40, 0.0), Rect{0, 0, 9, 39}, BandParams{}, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoFeatureEvidence);
    }
}

TEST(Band, TieGoesToPrior) {
    BandParams bp;
    bp.n_regions = 4;
    EdgeMap e = line_map(20, 100, 36);
    const EdgeMap b = line_map(20, 100, 86);
    for (std::size_t i = 0; i < e.data().size(); ++i) e.data()[i] += b.data()[i];
    const auto near1 = locate_feature_band(e, Rect{0, 0, 19, 99}, bp, 37.0 / 100.0);
    EXPECT_NEAR(near1.scores[1].e, near1.scores[3].e, 1e-12);
    EXPECT_EQ(near1.winner.index, 1);
    const auto near3 = locate_feature_band(e, Rect{0, 0, 19, 99}, bp, 87.0 / 100.0);
    EXPECT_EQ(near3.winner.index, 3);
}

TEST(Band, ScoresNonNegativeAndSumToOne) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(0.0, 50.0);
    for (int t = 0; t < 40; ++t) {
        EdgeMap e(25, 60);
        for (auto& v : e.data()) v = d(rng) > 40.0 ? d(rng) : 0.0;
        BandParams bp;
        bp.n_regions = 2 + t % 6;
        bp.weighting = t % 2 ? BandWeighting::Gaussian : BandWeighting::Uniform;
        const auto loc = locate_feature_band(e, Rect{2, 5, 22, 54}, bp, 0.4);
        double sum = 0.0;
        for (const auto& s : loc.scores) {
            EXPECT_GE(s.e, 0.0);
            sum += s.e;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
        for (const auto& s : loc.scores) EXPECT_LE(s.e, loc.winner.e);
    }
}

TEST(Band, AddingMassInsideBandNeverLowersIt) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> d(0.0, 20.0);
    BandParams bp;
    bp.n_regions = 4;
    const Rect search{0, 0, 15, 119};  // bands of 30 rows
    for (int t = 0; t < 40; ++t) {
        EdgeMap e(16, 120);
        for (auto& v : e.data()) v = d(rng);
        const int band = t % 4;
        const auto before = locate_feature_band(e, search, bp, 0.5);
        // stay 8 rows clear of band edges so filtering cannot leak the mass
        const int y = band * 30 + 8 + static_cast<int>(rng() % 14);
        for (int x = 0; x < 16; ++x) e(x, y) += d(rng);
        const auto after = locate_feature_band(e, search, bp, 0.5);
        EXPECT_GE(after.scores[band].e, before.scores[band].e - 1e-15);
    }
}

TEST(Band, WinnerContainsLineAwayFromBoundaries) {
    BandParams bp;
    bp.n_regions = 5;
    const Rect search{0, 0, 9, 99};  // bands of 20 rows
    for (int y = 0; y + 1 < 100; ++y) {
        if ((y + 1) % 20 == 0) continue;  // the two rows straddle a boundary
        const auto loc = locate_feature_band(line_map(10, 100, y), search, bp, 0.5);
        EXPECT_TRUE(loc.winner.band.contains(0, y)) << y;
        EXPECT_TRUE(loc.winner.band.contains(0, y + 1)) << y;
    }
}

// --- eyebrow ---------------------------------------------------------------

TEST(Eyebrow, UpperOfTwoStackedBlobs) {
    GrayImage crop(100, 100, 200);
    fill_rect(crop, 15, 20, 40, 23, 40);  // brow
    fill_rect(crop, 15, 32, 40, 37, 40);  // larger blob below it
    const auto res = extract_eyebrow(crop, FeatureId::LeftEyebrow, AnthropometricModel{});
    const Region r = mask_region(res.mask);
    EXPECT_NEAR(r.centroid.y, 21.5, 1.0);
    EXPECT_NEAR(r.centroid.x, 27.5, 1.0);
    EXPECT_LT(r.bbox.y2, 32);
}

TEST(Eyebrow, EmptyBoxNotFound) {
    const GrayImage crop(100, 100, 128);
    EXPECT_EQ(expect_not_found([&] { extract_eyebrow(crop, FeatureId::RightEyebrow, AnthropometricModel{}); }),
              FeatureId::RightEyebrow);
}

TEST(Eyebrow, SyntheticCentroids) {
    for (Expression e : kAllExpressions) {
        const auto [img, t] = render_face(expression_base(e));
        const GrayImage crop = truth_crop(img, t);
        const auto left = extract_eyebrow(crop, FeatureId::LeftEyebrow, AnthropometricModel{});
        const auto right = extract_eyebrow(crop, FeatureId::RightEyebrow, AnthropometricModel{});
        const Point2d lc = mask_region(left.mask).centroid;
        const Point2d rc = mask_region(right.mask).centroid;
        EXPECT_LE(std::hypot(lc.x + t.bbox.x1 - t.left_brow_centroid.x, lc.y + t.bbox.y1 - t.left_brow_centroid.y), 3.0);
        EXPECT_LE(std::hypot(rc.x + t.bbox.x1 - t.right_brow_centroid.x, rc.y + t.bbox.y1 - t.right_brow_centroid.y),
                  3.0);
    }
}

// --- lip -------------------------------------------------------------------

TEST(Lip, EllipseWidth) {
    GrayImage crop(100, 100, 200);
    for (int y = 0; y < 100; ++y) {
        for (int x = 0; x < 100; ++x) {
            const double u = (x - 50) / 20.5, v = (y - 80) / 5.0;
            if (u * u + v * v <= 1.0) crop(x, y) = 50;
        }
    }
    const auto lip = extract_lip(crop, AnthropometricModel{});
    EXPECT_NEAR(std::hypot(lip.right_corner.x - lip.left_corner.x, lip.right_corner.y - lip.left_corner.y), 40.0, 4.0);
    EXPECT_NEAR(lip.top_mid.y, 75.0 - 0.5, 1.0);
    EXPECT_NEAR(lip.bottom_mid.y, 85.0 + 0.5, 1.0);
}

TEST(Lip, CornersOnMaskBoundary) {
    for (Expression e : kAllExpressions) {
        const auto [img, t] = render_face(expression_base(e));
        const auto lip = extract_lip(truth_crop(img, t), AnthropometricModel{});
        const Region r = mask_region(lip.mask);
        EXPECT_DOUBLE_EQ(lip.left_corner.x, r.bbox.x1 - 0.5);
        EXPECT_DOUBLE_EQ(lip.right_corner.x, r.bbox.x2 + 0.5);
        EXPECT_TRUE(lip.mask.test(r.bbox.x1, static_cast<int>(lip.left_corner.y)));
        EXPECT_TRUE(lip.mask.test(r.bbox.x2, static_cast<int>(lip.right_corner.y)));
        EXPECT_LT(lip.top_mid.y, lip.bottom_mid.y);
    }
}

TEST(Lip, SmileCornersAboveBottom) {
    FaceParams p = neutral_params();
    p.mouth_lift = 0.15;
    const auto [img, t] = render_face(p);
    const auto lip = extract_lip(truth_crop(img, t), AnthropometricModel{});
    EXPECT_GT(lip.bottom_mid.y, lip.left_corner.y);
    EXPECT_GT(lip.bottom_mid.y, lip.right_corner.y);
}

TEST(Lip, BlankBoxNotFound) {
    GrayImage crop(100, 100, 150);
    fill_rect(crop, 15, 20, 40, 23, 40);
    EXPECT_EQ(expect_not_found([&] { extract_lip(crop, AnthropometricModel{}); }), FeatureId::Lip);
}

// --- nose ------------------------------------------------------------------

TEST(Nose, SyntheticRow) {
    for (double off : {-0.08, 0.0, 0.06}) {
        FaceParams p = neutral_params();
        p.nose_offset = off;
        const auto [img, t] = render_face(p);
        const auto nose = extract_nose_ref(truth_crop(img, t), AnthropometricModel{});
        EXPECT_LE(std::abs(nose.nose_y + t.bbox.y1 - t.nose_row), 2.0) << off;
    }
}

TEST(Nose, EmptyBoxNotFound) {
    EXPECT_EQ(expect_not_found([] { extract_nose_ref(GrayImage(100, 100, 90), AnthropometricModel{}); }),
              FeatureId::Nose);
}

TEST(Nose, EqualPeaksPreferPrior) {
    // two identical vertical-edge marks inside the nose box (rows 45..69)
    GrayImage crop(100, 100, 200);
    fill_rect(crop, 40, 49, 60, 50, 40);
    fill_rect(crop, 40, 63, 60, 64, 40);
    AnthropometricModel m;
    m.nose.prior_yf = 0.66;
    const auto lower = extract_nose_ref(crop, m);
    EXPECT_NEAR(lower.nose_y, 63.5, 1.0);
    m.nose.prior_yf = 0.48;
    const auto upper = extract_nose_ref(crop, m);
    EXPECT_NEAR(upper.nose_y, 49.5, 1.0);
}

// --- composite -------------------------------------------------------------

TEST(ExtractAll, NeutralFaceCentroids) {
    const auto [img, t] = render_face(neutral_params());
    const auto fm = extract_all(truth_crop(img, t), AnthropometricModel{});
    const auto off = [&](Point2d p) { return Point2d{p.x + t.bbox.x1, p.y + t.bbox.y1}; };
    const auto dist = [](Point2d a, Point2d b) { return std::hypot(a.x - b.x, a.y - b.y); };
    EXPECT_LE(dist(off(mask_region(fm.left_eyebrow).centroid), t.left_brow_centroid), 4.0);
    EXPECT_LE(dist(off(mask_region(fm.right_eyebrow).centroid), t.right_brow_centroid), 4.0);
    EXPECT_LE(dist(off(mask_region(fm.lip).centroid), t.mouth_centroid), 4.0);
    EXPECT_LE(std::abs(fm.nose_y + t.bbox.y1 - t.nose_row), 4.0);
}

TEST(ExtractAll, UniformGrayFailsOnLeftEyebrow) {
    EXPECT_EQ(expect_not_found([] { extract_all(GrayImage(120, 120, 128), AnthropometricModel{}); }),
              FeatureId::LeftEyebrow);
}

TEST(ExtractAll, ScaleRobustness) {
    const PipelineConfig cfg;
    for (Expression e : {Expression::Joy, Expression::Surprise, Expression::Anger}) {
        const auto [img, t] = render_face(expression_base(e));
        const Rect b2{2 * t.bbox.x1, 2 * t.bbox.y1, 2 * t.bbox.x2 + 1, 2 * t.bbox.y2 + 1};
        const auto a1 = analyze_box(img, t.bbox, cfg);
        const auto a2 = analyze_box(upscale_nearest(img, 2), b2, cfg);
        const auto check = [&](const BinaryMask& m1, const BinaryMask& m2) {
            const Point2d c1 = mask_region(m1).centroid;
            const Point2d c2 = mask_region(m2).centroid;
            EXPECT_LE(std::hypot(c2.x - (2 * c1.x + 0.5), c2.y - (2 * c1.y + 0.5)), 3.0);
        };
        check(a1.masks.left_eyebrow, a2.masks.left_eyebrow);
        check(a1.masks.right_eyebrow, a2.masks.right_eyebrow);
        check(a1.masks.lip, a2.masks.lip);
        EXPECT_LE(std::abs(a2.masks.nose_y - (2 * a1.masks.nose_y + 0.5)), 3.0);
    }
}

TEST(ExtractAll, CorpusSuccessRate) {
    int ok = 0;
    for (int i = 0; i < 50; ++i) {
        const auto p = expression_preset(kAllExpressions[i % 6], 0.15, derive_seed(31, i));
        const auto [img, t] = render_face(p);
        try {
            analyze_image(img, PipelineConfig{});
            ++ok;
        } catch (const Error&) {
        }
    }
    EXPECT_GE(ok, 48);
}

TEST(FaceScale, NormalizeIsNoOpAtZero) {
    const GrayImage g(40, 50, 7);
    EXPECT_EQ(normalize_face_scale(g, 0), g);
    const GrayImage r = normalize_face_scale(g, 80);
    EXPECT_EQ(r.width(), 80);
    EXPECT_EQ(r.height(), 100);
    for (auto v : r.data()) EXPECT_EQ(v, 7);
}
