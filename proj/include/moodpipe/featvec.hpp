#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <vector>

#include "moodpipe/error.hpp"
#include "moodpipe/featextract.hpp"
#include "moodpipe/image.hpp"
#include "moodpipe/imgcore.hpp"

namespace moodpipe {

inline constexpr int kFeatureDim = 7;
inline constexpr std::array<std::string_view, kFeatureDim> kFeatureNames{"He", "We", "Hm", "Wm", "Rul", "Rll", "NL"};

/// Geometric face descriptor. Lengths are normalized by the face box
/// (heights by its height, widths by its width); curvatures are signed
/// and dimensionless, positive when the lip's corners turn upward.
struct FeatureVector {
    std::array<double, kFeatureDim> values{};

    double he() const { return values[0]; }   // eyebrow elevation above the nose row
    double we() const { return values[1]; }   // gap between inner eyebrow ends
    double hm() const { return values[2]; }   // mouth opening at the midline
    double wm() const { return values[3]; }   // corner-to-corner mouth width
    double rul() const { return values[4]; }  // upper lip curvature
    double rll() const { return values[5]; }  // lower lip curvature
    double nl() const { return values[6]; }   // nose row to upper lip

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

namespace detail {

inline double distance(Point2d a, Point2d b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Inner end of a mask: outer edge of its max-x column (toward_right) or
/// min-x column, at the mean y of that column's pixels.
inline Point2d inner_end(const BinaryMask& m, bool toward_right) {
    const Region r = mask_region(m);
    const int x = toward_right ? r.bbox.x2 : r.bbox.x1;
    double sy = 0.0;
    int n = 0;
    for (int y = r.bbox.y1; y <= r.bbox.y2; ++y) {
        if (m.test(x, y)) {
            sy += y;
            ++n;
        }
    }
    return {x + (toward_right ? 0.5 : -0.5), sy / n};
}

/// Least-squares quadratic coefficient `a` of v = a u^2 + b u + c.
inline double quadratic_leading_coeff(const std::vector<Point2d>& pts) {
    if (pts.size() < 3) throw Error(ErrorKind::DegenerateCurvature, "need at least 3 boundary points");
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](Point2d a, Point2d b) { return a.y < b.y; });
    if (lo->y == hi->y) return 0.0;
    // Normal equations on moments of u; u is already centered on the midline.
    double s[5] = {0, 0, 0, 0, 0};
    double t[3] = {0, 0, 0};
    for (const auto& p : pts) {
        double up = 1.0;
        for (int k = 0; k < 5; ++k) {
            s[k] += up;
            if (k < 3) t[k] += up * p.y;
            up *= p.x;
        }
    }
    // Rows ordered [c, b, a]:  [s0 s1 s2; s1 s2 s3; s2 s3 s4] * [c b a]^T = [t0 t1 t2]
    double m[3][4] = {{s[0], s[1], s[2], t[0]}, {s[1], s[2], s[3], t[1]}, {s[2], s[3], s[4], t[2]}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        }
        if (std::abs(m[piv][col]) < 1e-12) throw Error(ErrorKind::DegenerateCurvature, "singular curvature fit");
        if (piv != col) {
            for (int k = 0; k < 4; ++k) std::swap(m[col][k], m[piv][k]);
        }
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int k = col; k < 4; ++k) m[r][k] -= f * m[col][k];
        }
    }
    return m[2][3] / m[2][2];
}

}  // namespace detail

/// Boundary points of the lip mask in a y-up frame centered on the mask
/// midline: the topmost (upper) or bottommost pixel of each column.
inline std::vector<Point2d> lip_boundary(const BinaryMask& lip, bool upper) {
    const Region r = mask_region(lip);
    const double mid = 0.5 * (r.bbox.x1 + r.bbox.x2);
    std::vector<Point2d> pts;
    for (int x = r.bbox.x1; x <= r.bbox.x2; ++x) {
        int found = -1;
        for (int y = r.bbox.y1; y <= r.bbox.y2; ++y) {
            if (!lip.test(x, y)) continue;
            found = y;
            if (upper) break;
        }
        if (found >= 0) pts.push_back({x - mid, -static_cast<double>(found)});
    }
    return pts;
}

inline FeatureVector compute_feature_vector(const FeatureMasks& fm, const Rect& face_bbox) {
    if (!face_bbox.valid()) throw Error(ErrorKind::InvalidRect, "face box must be non-empty");
    const auto need = [](const BinaryMask& m, FeatureId f) {
        if (m.empty() || m.none()) {
            throw Error(ErrorKind::MissingFeature, "empty feature mask", std::string(feature_name(f)));
        }
    };
    need(fm.left_eyebrow, FeatureId::LeftEyebrow);
    need(fm.right_eyebrow, FeatureId::RightEyebrow);
    need(fm.lip, FeatureId::Lip);

    const double w = face_bbox.width();
    const double h = face_bbox.height();
    const Point2d lc = mask_region(fm.left_eyebrow).centroid;
    const Point2d rc = mask_region(fm.right_eyebrow).centroid;
    const Point2d brow_mid{0.5 * (lc.x + rc.x), 0.5 * (lc.y + rc.y)};
    const Point2d nose_ref{brow_mid.x, static_cast<double>(fm.nose_y)};

    FeatureVector f;
    f.values[0] = detail::distance(brow_mid, nose_ref) / h;
    f.values[1] = detail::distance(detail::inner_end(fm.left_eyebrow, true),
                                   detail::inner_end(fm.right_eyebrow, false)) / w;
    f.values[2] = detail::distance(fm.lip_top_mid, fm.lip_bottom_mid) / h;
    f.values[3] = detail::distance(fm.lip_left_corner, fm.lip_right_corner) / w;
    f.values[4] = 2.0 * detail::quadratic_leading_coeff(lip_boundary(fm.lip, true)) * w;
    f.values[5] = -2.0 * detail::quadratic_leading_coeff(lip_boundary(fm.lip, false)) * w;
    f.values[6] = detail::distance(fm.lip_top_mid, Point2d{fm.lip_top_mid.x, static_cast<double>(fm.nose_y)}) / h;
    return f;
}

}  // namespace moodpipe
