#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "moodpipe/imgcore.hpp"

using namespace moodpipe;

namespace {

GrayImage random_gray(int w, int h, std::mt19937& rng, int levels = 256) {
    GrayImage g(w, h);
    std::uniform_int_distribution<int> d(0, levels - 1);
    for (auto& v : g.data()) v = static_cast<std::uint8_t>(d(rng) * (255 / std::max(1, levels - 1)));
    return g;
}

BinaryMask random_mask(int w, int h, std::mt19937& rng, double p = 0.4) {
    BinaryMask m(w, h);
    std::bernoulli_distribution d(p);
    for (auto& v : m.data()) v = d(rng) ? 1 : 0;
    return m;
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        if (a.data()[i] && !b.data()[i]) return false;
    }
    return true;
}

// 4-connected flood from the border over unset pixels; true where reached.
BinaryMask border_flood(const BinaryMask& m) {
    BinaryMask seen(m.width(), m.height());
    std::vector<std::pair<int, int>> st;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            const bool border = x == 0 || y == 0 || x == m.width() - 1 || y == m.height() - 1;
            if (border && !m.test(x, y)) {
                seen.set(x, y);
                st.emplace_back(x, y);
            }
        }
    }
    while (!st.empty()) {
        auto [x, y] = st.back();
        st.pop_back();
        const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k], ny = y + dy[k];
            if (m.in_bounds(nx, ny) && !m.test(nx, ny) && !seen.test(nx, ny)) {
                seen.set(nx, ny);
                st.emplace_back(nx, ny);
            }
        }
    }
    return seen;
}

EdgeMap circle_outline(int w, int h, int cx, int cy, int r) {
    EdgeMap e(w, h, 0.0);
    // dense parametric sampling, independent of the library's rasterizer
    for (int k = 0; k < 8 * r * 8; ++k) {
        const double t = 2.0 * M_PI * k / (64.0 * r);
        const int x = static_cast<int>(std::lround(cx + r * std::cos(t)));
        const int y = static_cast<int>(std::lround(cy + r * std::sin(t)));
        if (e.in_bounds(x, y)) e(x, y) = 255.0;
    }
    return e;
}

}  // namespace

// --- grayscale -------------------------------------------------------------

TEST(Grayscale, WhiteAndBlack) {
    EXPECT_EQ(to_grayscale(RasterImage(4, 3, Rgb{255, 255, 255})), GrayImage(4, 3, 255));
    EXPECT_EQ(to_grayscale(RasterImage(4, 3, Rgb{0, 0, 0})), GrayImage(4, 3, 0));
}

TEST(Grayscale, PureRed) {
    EXPECT_EQ(to_grayscale(RasterImage(1, 1, Rgb{255, 0, 0}))(0, 0), 76);
}

TEST(Grayscale, MatchesRoundedWeightedSum) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> d(0, 255);
    RasterImage img(16, 16, 3);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(d(rng));
    const GrayImage g = to_grayscale(img);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            const Rgb p = img.rgb(x, y);
            const long want = std::lround(0.299 * p.r + 0.587 * p.g + 0.114 * p.b);
            EXPECT_EQ(g(x, y), want);
        }
    }
}

TEST(Grayscale, RejectsSingleChannel) {
    try {
        to_grayscale(RasterImage(3, 3, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidChannelCount);
    }
}

// --- median ----------------------------------------------------------------

TEST(Median, ConstantImageUnchanged) {
    const GrayImage g(9, 7, 42);
    EXPECT_EQ(median_filter(g, 3), g);
    EXPECT_EQ(median_filter(g, 5), g);
}

TEST(Median, RemovesImpulse) {
    GrayImage g(5, 5, 0);
    g(2, 2) = 255;
    EXPECT_EQ(median_filter(g, 3), GrayImage(5, 5, 0));
}

TEST(Median, StepRowPreserved) {
    GrayImage g(5, 1, 0);
    g(2, 0) = g(3, 0) = g(4, 0) = 255;
    EXPECT_EQ(median_filter(g, 3), g);
}

TEST(Median, EvenWindowRejected) {
    try {
        median_filter(GrayImage(4, 4), 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidWindow);
    }
}

TEST(Median, MatchesSortedWindowOracle) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const GrayImage g = random_gray(11, 8, rng);
        const int win = trial % 2 ? 5 : 3;
        const GrayImage m = median_filter(g, win);
        for (int y = 0; y < g.height(); ++y) {
            for (int x = 0; x < g.width(); ++x) {
                std::vector<int> w;
                for (int dy = -win / 2; dy <= win / 2; ++dy) {
                    for (int dx = -win / 2; dx <= win / 2; ++dx) {
                        w.push_back(g(std::clamp(x + dx, 0, 10), std::clamp(y + dy, 0, 7)));
                    }
                }
                std::sort(w.begin(), w.end());
                ASSERT_EQ(m(x, y), w[w.size() / 2]);
                EXPECT_NE(std::find(w.begin(), w.end(), m(x, y)), w.end());
            }
        }
    }
}

// --- gaussian --------------------------------------------------------------

TEST(Gaussian, ConstantUnchanged) {
    const std::vector<double> v(20, 3.5);
    for (double s : {0.5, 1.0, 2.5}) {
        for (double o : gaussian_smooth_1d(v, s)) EXPECT_NEAR(o, 3.5, 1e-9);
    }
}

TEST(Gaussian, ImpulseGivesNormalizedKernel) {
    std::vector<double> v(21, 0.0);
    v[10] = 1.0;
    const auto out = gaussian_smooth_1d(v, 1.0);
    double z = 0.0;
    for (int k = -3; k <= 3; ++k) z += std::exp(-k * k / 2.0);
    for (int k = -3; k <= 3; ++k) EXPECT_NEAR(out[10 + k], std::exp(-k * k / 2.0) / z, 1e-12);
    EXPECT_EQ(out[6], 0.0);
    EXPECT_EQ(out[14], 0.0);
}

TEST(Gaussian, PreservesMassAwayFromEdges) {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> d(0.0, 10.0);
    std::vector<double> v(60, 0.0);
    for (int i = 15; i < 45; ++i) v[i] = d(rng);
    const auto out = gaussian_smooth_1d(v, 2.0);
    EXPECT_NEAR(std::accumulate(out.begin(), out.end(), 0.0), std::accumulate(v.begin(), v.end(), 0.0), 1e-6);
    EXPECT_EQ(out.size(), v.size());
}

TEST(Gaussian, NonPositiveSigmaRejected) {
    const std::vector<double> v(5, 1.0);
    for (double s : {0.0, -1.0}) {
        try {
            gaussian_smooth_1d(v, s);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidSigma);
        }
    }
}

// --- sobel -----------------------------------------------------------------

TEST(Sobel, ConstantIsZero) {
    for (auto o : {SobelOrientation::Horizontal, SobelOrientation::Vertical, SobelOrientation::Magnitude}) {
        EXPECT_EQ(sobel_edges(GrayImage(8, 8, 100), o), EdgeMap(8, 8, 0.0));
    }
}

TEST(Sobel, VerticalStep) {
    GrayImage g(8, 6, 0);
    for (int y = 0; y < 6; ++y) {
        for (int x = 4; x < 8; ++x) g(x, y) = 255;
    }
    const EdgeMap v = sobel_edges(g, SobelOrientation::Vertical);
    const EdgeMap h = sobel_edges(g, SobelOrientation::Horizontal);
    for (int y = 1; y < 5; ++y) {
        EXPECT_EQ(v(3, y), 1020.0);
        EXPECT_EQ(v(4, y), 1020.0);
        EXPECT_EQ(v(2, y), 0.0);
        EXPECT_EQ(v(5, y), 0.0);
    }
    for (double x : h.data()) EXPECT_EQ(x, 0.0);
    for (int x = 0; x < 8; ++x) EXPECT_EQ(v(x, 0), 0.0);
}

TEST(Sobel, ResponseLinearInContrast) {
    for (int c : {10, 50, 120}) {
        GrayImage g(6, 6, 0);
        for (int x = 0; x < 6; ++x) {
            for (int y = 3; y < 6; ++y) g(x, y) = static_cast<std::uint8_t>(c);
        }
        const EdgeMap h = sobel_edges(g, SobelOrientation::Horizontal);
        EXPECT_EQ(h(2, 2), 4.0 * c);
        EXPECT_EQ(sobel_edges(g, SobelOrientation::Magnitude)(2, 3), 4.0 * c);
    }
}

// --- LoG -------------------------------------------------------------------

TEST(LoG, ConstantGivesEmptyMask) {
    const auto m = log_zero_contours(GrayImage(12, 12, 77), 1.5);
    EXPECT_TRUE(m.none());
    EXPECT_EQ(m.width(), 12);
    EXPECT_EQ(m.height(), 12);
}

TEST(LoG, DiskIsEnclosedByRing) {
    GrayImage g(40, 40, 20);
    for (int y = 0; y < 40; ++y) {
        for (int x = 0; x < 40; ++x) {
            if ((x - 20) * (x - 20) + (y - 20) * (y - 20) <= 64) g(x, y) = 220;
        }
    }
    const BinaryMask ring = log_zero_contours(g, 1.5);
    EXPECT_FALSE(ring.none());
    EXPECT_FALSE(ring.test(20, 20));
    EXPECT_FALSE(border_flood(ring).test(20, 20));
    EXPECT_TRUE(border_flood(ring).test(2, 2));
}

// --- morphology ------------------------------------------------------------

TEST(Morph, CloseExtensiveOpenAntiExtensive) {
    std::mt19937 rng(21);
    for (int t = 0; t < 30; ++t) {
        const BinaryMask m = random_mask(15, 12, rng, 0.3 + 0.02 * t);
        const int a = 1 + t % 3, b = 1 + (t / 3) % 2;
        EXPECT_TRUE(subset(m, morph(m, MorphOp::Close, a, b)));
        EXPECT_TRUE(subset(morph(m, MorphOp::Open, a, b), m));
    }
}

TEST(Morph, GapClosedInThreeBySevenGrid) {
    // a bar filling the grid height, cut by one empty column
    BinaryMask m(7, 3);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 7; ++x) m.set(x, y, x != 3);
    }
    const BinaryMask c = morph(m, MorphOp::Close, 2, 1);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 7; ++x) EXPECT_TRUE(c.test(x, y)) << x << ',' << y;
    }
}

TEST(Morph, DilateErodeDualityInInterior) {
    std::mt19937 rng(4);
    for (int t = 0; t < 20; ++t) {
        const BinaryMask m = random_mask(20, 16, rng);
        BinaryMask comp(20, 16);
        for (std::size_t i = 0; i < m.data().size(); ++i) comp.data()[i] = !m.data()[i];
        const BinaryMask d = morph(m, MorphOp::Dilate, 2, 1);
        const BinaryMask e = morph(comp, MorphOp::Erode, 2, 1);
        for (int y = 1; y < 15; ++y) {
            for (int x = 2; x < 18; ++x) EXPECT_EQ(d.test(x, y), !e.test(x, y));
        }
    }
}

TEST(Morph, EllipticElementShape) {
    const auto se = elliptic_element(2, 1);
    // (0,0), (+-1,0), (+-2,0), (0,+-1)
    EXPECT_EQ(se.size(), 7u);
    EXPECT_THROW(elliptic_element(0, 1), Error);
}

// --- fill ------------------------------------------------------------------

TEST(Fill, EmptyAndSinglePixel) {
    EXPECT_TRUE(fill_contours(BinaryMask(6, 6)).none());
    BinaryMask one(6, 6);
    one.set(3, 2);
    EXPECT_EQ(fill_contours(one), one);
}

TEST(Fill, RingBecomesDisk) {
    BinaryMask ring(30, 30);
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 30; ++x) {
            const int d2 = (x - 15) * (x - 15) + (y - 15) * (y - 15);
            if (d2 >= 64 && d2 <= 100) ring.set(x, y);
        }
    }
    const BinaryMask filled = fill_contours(ring);
    const BinaryMask outside = border_flood(ring);
    for (std::size_t i = 0; i < filled.data().size(); ++i) EXPECT_EQ(filled.data()[i], !outside.data()[i]);
    EXPECT_TRUE(filled.test(15, 15));
}

TEST(Fill, Idempotent) {
    std::mt19937 rng(8);
    for (int t = 0; t < 20; ++t) {
        const BinaryMask f = fill_contours(random_mask(18, 14, rng, 0.35));
        EXPECT_EQ(fill_contours(f), f);
    }
}

// --- components ------------------------------------------------------------

TEST(Components, EmptyMask) { EXPECT_TRUE(connected_components(BinaryMask(5, 5), 8).empty()); }

TEST(Components, TwoBlocks) {
    BinaryMask m(5, 2);
    for (int y = 0; y < 2; ++y) {
        m.set(0, y);
        m.set(1, y);
        m.set(3, y);
        m.set(4, y);
    }
    const auto r = connected_components(m, 4);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].area, 4);
    EXPECT_EQ(r[1].area, 4);
}

TEST(Components, DiagonalPair) {
    BinaryMask m(2, 2);
    m.set(0, 0);
    m.set(1, 1);
    EXPECT_EQ(connected_components(m, 4).size(), 2u);
    EXPECT_EQ(connected_components(m, 8).size(), 1u);
}

TEST(Components, AreasSumAndRegionsConnected) {
    std::mt19937 rng(12);
    for (int conn : {4, 8}) {
        for (int t = 0; t < 15; ++t) {
            const BinaryMask m = random_mask(16, 12, rng, 0.45);
            const Labeling lab = label_components(m, conn);
            long long total = 0;
            for (std::size_t i = 0; i + 1 < lab.regions.size(); ++i) {
                EXPECT_GE(lab.regions[i].area, lab.regions[i + 1].area);
            }
            for (const auto& r : lab.regions) {
                total += r.area;
                EXPECT_TRUE(r.bbox.contains(r.centroid.x, r.centroid.y));
                // each region is exactly one component of its own mask
                EXPECT_EQ(connected_components(region_mask(lab, r.label), conn).size(), 1u);
            }
            EXPECT_EQ(total, m.count());
            for (std::size_t i = 0; i < m.data().size(); ++i) EXPECT_EQ(m.data()[i] != 0, lab.labels.data()[i] != 0);
        }
    }
}

// --- projections -----------------------------------------------------------

TEST(Projections, ZeroMap) {
    const auto p = integral_projections(EdgeMap(5, 4, 0.0), Rect{1, 0, 3, 3});
    EXPECT_EQ(p.vertical, std::vector<double>(3, 0.0));
    EXPECT_EQ(p.horizontal, std::vector<double>(4, 0.0));
}

TEST(Projections, SingleValue) {
    GrayImage g(6, 6, 0);
    const Rect r{2, 1, 4, 3};
    g(r.x1 + 1, r.y1 + 2) = 5;
    const auto p = integral_projections(g, r);
    EXPECT_EQ(p.vertical, (std::vector<std::int64_t>{0, 5, 0}));
    EXPECT_EQ(p.horizontal, (std::vector<std::int64_t>{0, 0, 5}));
}

TEST(Projections, ConservationExact) {
    std::mt19937 rng(77);
    for (int t = 0; t < 50; ++t) {
        const GrayImage g = random_gray(23, 17, rng);
        std::uniform_int_distribution<int> dx(0, 22), dy(0, 16);
        int x1 = dx(rng), x2 = dx(rng), y1 = dy(rng), y2 = dy(rng);
        const Rect r{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
        const auto p = integral_projections(g, r);
        std::int64_t mass = 0;
        for (int y = r.y1; y <= r.y2; ++y) {
            for (int x = r.x1; x <= r.x2; ++x) mass += g(x, y);
        }
        EXPECT_EQ(std::accumulate(p.vertical.begin(), p.vertical.end(), std::int64_t{0}), mass);
        EXPECT_EQ(std::accumulate(p.horizontal.begin(), p.horizontal.end(), std::int64_t{0}), mass);
    }
}

TEST(Projections, OutOfBoundsRect) {
    try {
        integral_projections(GrayImage(4, 4), Rect{0, 0, 4, 3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidRect);
    }
}

// --- hough -----------------------------------------------------------------

TEST(Hough, BlankMap) {
    EXPECT_TRUE(hough_circles(EdgeMap(40, 40, 0.0), HoughParams{5, 15, 0.0, 0.5}).empty());
}

TEST(Hough, RecoversCircle) {
    const auto c = hough_circles(circle_outline(100, 100, 50, 50, 20), HoughParams{10, 30, 0.0, 0.5});
    ASSERT_FALSE(c.empty());
    EXPECT_LE(std::hypot(c[0].cx - 50, c[0].cy - 50), 2.0);
    EXPECT_LE(std::abs(c[0].r - 20), 1);
}

TEST(Hough, TwoCircles) {
    EdgeMap e = circle_outline(160, 100, 40, 50, 20);
    const EdgeMap b = circle_outline(160, 100, 115, 45, 25);
    for (std::size_t i = 0; i < e.data().size(); ++i) e.data()[i] = std::max(e.data()[i], b.data()[i]);
    const auto c = hough_circles(e, HoughParams{10, 35, 0.0, 0.6});
    ASSERT_GE(c.size(), 2u);
    const auto matched = [&](int cx, int cy, int r) {
        return std::any_of(c.begin(), c.begin() + 2, [&](const Circle& k) {
            return std::hypot(k.cx - cx, k.cy - cy) <= 2.0 && std::abs(k.r - r) <= 1;
        });
    };
    EXPECT_TRUE(matched(40, 50, 20));
    EXPECT_TRUE(matched(115, 45, 25));
}

TEST(Hough, RandomPlacements) {
    std::mt19937 rng(2024);
    for (int t = 0; t < 50; ++t) {
        const int r = std::uniform_int_distribution<int>(10, 40)(rng);
        const int cx = std::uniform_int_distribution<int>(r + 2, 120 - r - 3)(rng);
        const int cy = std::uniform_int_distribution<int>(r + 2, 120 - r - 3)(rng);
        const auto c = hough_circles(circle_outline(120, 120, cx, cy, r), HoughParams{8, 45, 0.0, 0.5});
        ASSERT_FALSE(c.empty());
        EXPECT_LE(std::hypot(c[0].cx - cx, c[0].cy - cy), 2.0) << t;
        EXPECT_LE(std::abs(c[0].r - r), 1) << t;
    }
}

TEST(Hough, InvalidRadiusRange) {
    try {
        hough_circles(EdgeMap(10, 10, 0.0), HoughParams{8, 5, 0.0, 0.5});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidRadiusRange);
    }
}

// --- image io --------------------------------------------------------------

TEST(Pnm, RoundTripColorAndGray) {
    std::mt19937 rng(1);
    RasterImage c(7, 5, 3);
    RasterImage g(6, 4, 1);
    for (auto& v : c.data()) v = static_cast<std::uint8_t>(rng());
    for (auto& v : g.data()) v = static_cast<std::uint8_t>(rng());
    for (const auto& img : {c, g}) {
        std::stringstream ss;
        write_pnm(ss, img);
        EXPECT_EQ(read_pnm(ss).data(), img.data());
    }
}

TEST(Pnm, HeaderBytes) {
    std::stringstream ss;
    write_pnm(ss, RasterImage(2, 1, Rgb{1, 2, 3}));
    EXPECT_EQ(ss.str(), std::string("P6\n2 1\n255\n\x01\x02\x03\x01\x02\x03", 17));
}
