#pragma once

// Skin-filter face detection: non-skin elimination, skin segmentation,
// per-region Hough circle search and colour-based confirmation.

#include <algorithm>
#include <cmath>
#include <vector>

#include "moodpipe/error.hpp"
#include "moodpipe/image.hpp"
#include "moodpipe/imgcore.hpp"

namespace moodpipe {

struct Hsv {
    double h = 0.0;  // degrees, [0, 360)
    double s = 0.0;  // [0, 1]
    double v = 0.0;  // [0, 1]
};

/// Hexcone HSV. Achromatic pixels get hue 0 and saturation 0.
inline Hsv rgb_to_hsv(Rgb p) {
    const int mx = std::max({p.r, p.g, p.b});
    const int mn = std::min({p.r, p.g, p.b});
    const double delta = mx - mn;
    Hsv out;
    out.v = mx / 255.0;
    if (mx == 0 || delta == 0.0) return out;
    out.s = delta / mx;
    double h;
    if (mx == p.r) {
        h = 60.0 * ((p.g - p.b) / delta);
    } else if (mx == p.g) {
        h = 60.0 * ((p.b - p.r) / delta + 2.0);
    } else {
        h = 60.0 * ((p.r - p.g) / delta + 4.0);
    }
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
    return out;
}

/// Hue range may wrap through 0 (hue_min > hue_max).
struct SkinThresholds {
    double hue_min = 0.0;
    double hue_max = 50.0;
    double sat_min = 0.15;
    double sat_max = 0.68;

    void validate() const {
        if (hue_min < 0.0 || hue_min >= 360.0 || hue_max < 0.0 || hue_max >= 360.0) {
            throw Error(ErrorKind::ConfigError, "hue bounds must lie in [0, 360)");
        }
        if (sat_min < 0.0 || sat_max > 1.0 || sat_min > sat_max) {
            throw Error(ErrorKind::ConfigError, "need 0 <= sat_min <= sat_max <= 1");
        }
    }
    bool accepts(const Hsv& c) const {
        const bool hue_ok = hue_min <= hue_max ? (c.h >= hue_min && c.h <= hue_max)
                                               : (c.h >= hue_min || c.h <= hue_max);
        return hue_ok && c.s >= sat_min && c.s <= sat_max;
    }
};

inline BinaryMask skin_mask(const RasterImage& img, const SkinThresholds& t) {
    if (img.channels() != 3) {
        throw Error(ErrorKind::InvalidChannelCount, "skin_mask expects a 3-channel image");
    }
    BinaryMask m(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) m.set(x, y, t.accepts(rgb_to_hsv(img.rgb(x, y))));
    }
    return m;
}

/// Non-skin pixels become white; skin pixels pass through.
inline RasterImage eliminate_nonskin(const RasterImage& img, const SkinThresholds& t) {
    const BinaryMask m = skin_mask(img, t);
    RasterImage out = img;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (!m.test(x, y)) out.set_rgb(x, y, {255, 255, 255});
        }
    }
    return out;
}

/// 8-connected skin regions of at least `min_area` pixels after one
/// elliptic closing (a = b = 2), largest first.
inline std::vector<Region> segment_skin_regions(const BinaryMask& mask, long long min_area) {
    const BinaryMask closed = morph(mask, MorphOp::Close, 2, 2);
    std::vector<Region> out;
    for (const auto& r : connected_components(closed, 8)) {
        if (r.area >= min_area) out.push_back(r);
    }
    return out;
}

/// skin fraction inside the circle times the clamped accumulator fit.
inline double face_confidence(const RasterImage& img, const BinaryMask& mask, const Circle& c) {
    (void)img;
    long long inside = 0;
    long long skin = 0;
    const long long r2 = static_cast<long long>(c.r) * c.r;
    for (int y = std::max(0, c.cy - c.r); y <= std::min(mask.height() - 1, c.cy + c.r); ++y) {
        for (int x = std::max(0, c.cx - c.r); x <= std::min(mask.width() - 1, c.cx + c.r); ++x) {
            const long long dx = x - c.cx;
            const long long dy = y - c.cy;
            if (dx * dx + dy * dy > r2) continue;
            ++inside;
            if (mask.test(x, y)) ++skin;
        }
    }
    if (inside == 0) return 0.0;
    const double fill = static_cast<double>(skin) / static_cast<double>(inside);
    const double fit = std::clamp(c.score / ideal_perimeter_votes(c.r), 0.0, 1.0);
    return std::clamp(fill, 0.0, 1.0) * fit;
}

struct DetectConfig {
    SkinThresholds thresholds;
    double min_region_area = 0.01;  // fraction of image area
    double r_min_frac = 0.1;
    double r_max_frac = 0.45;
    double confidence_floor = 0.35;
    int max_faces = 4;
    int median_window = 3;
    double vote_fraction = 0.3;
    double max_aspect = 1.25;  // clipped bbox long side / short side

    void validate() const {
        thresholds.validate();
        if (!(r_min_frac > 0.0 && r_min_frac < r_max_frac && r_max_frac <= 0.5)) {
            throw Error(ErrorKind::ConfigError, "need 0 < r_min_frac < r_max_frac <= 0.5");
        }
        if (confidence_floor < 0.0 || confidence_floor > 1.0) {
            throw Error(ErrorKind::ConfigError, "confidence_floor must lie in [0, 1]");
        }
        if (min_region_area < 0.0 || min_region_area > 1.0) {
            throw Error(ErrorKind::ConfigError, "min_region_area is a fraction in [0, 1]");
        }
        if (max_faces < 1) throw Error(ErrorKind::ConfigError, "max_faces must be >= 1");
        if (median_window < 3 || median_window % 2 == 0) {
            throw Error(ErrorKind::ConfigError, "median_window must be odd and >= 3");
        }
        if (!(vote_fraction > 0.0 && vote_fraction <= 1.0)) {
            throw Error(ErrorKind::ConfigError, "vote_fraction must lie in (0, 1]");
        }
        if (max_aspect < 1.0) throw Error(ErrorKind::ConfigError, "max_aspect must be >= 1");
    }
};

struct FaceDetection {
    Circle circle;
    Rect bbox;  // square circumscribing the circle, clipped to the image
    double confidence = 0.0;
    Region skin_region;
};

inline Rect circle_bbox(const Circle& c, int width, int height) {
    return intersect(Rect{c.cx - c.r, c.cy - c.r, c.cx + c.r, c.cy + c.r},
                     Rect{0, 0, width - 1, height - 1});
}

inline std::vector<FaceDetection> detect_faces(const RasterImage& img, const DetectConfig& cfg) {
    if (img.channels() != 3) {
        throw Error(ErrorKind::InvalidChannelCount, "detect_faces expects a 3-channel image");
    }
    if (img.width() < 32 || img.height() < 32) {
        throw Error(ErrorKind::ImageTooSmall, "detection needs at least 32x32 pixels");
    }
    cfg.validate();

    const RasterImage cleaned = eliminate_nonskin(img, cfg.thresholds);
    const GrayImage gray = median_filter(to_grayscale(cleaned), cfg.median_window);
    const BinaryMask skin = skin_mask(img, cfg.thresholds);
    const long long min_area = static_cast<long long>(
        std::ceil(cfg.min_region_area * static_cast<double>(img.width()) * img.height()));
    const auto regions = segment_skin_regions(skin, std::max(1LL, min_area));
    if (regions.empty()) return {};

    const EdgeMap edges = sobel_edges(gray, SobelOrientation::Magnitude);
    const int min_dim = std::min(img.width(), img.height());
    const int r_min = std::max(1, static_cast<int>(std::lround(cfg.r_min_frac * min_dim)));
    const int r_max = std::max(r_min, static_cast<int>(std::lround(cfg.r_max_frac * min_dim)));

    std::vector<FaceDetection> found;
    for (const Region& reg : regions) {
        constexpr int margin = 3;
        const Rect window = intersect(
            Rect{reg.bbox.x1 - margin, reg.bbox.y1 - margin, reg.bbox.x2 + margin, reg.bbox.y2 + margin},
            Rect{0, 0, img.width() - 1, img.height() - 1});
        const int cap = (std::max(reg.bbox.width(), reg.bbox.height()) + 1) / 2 + 2;
        const int r_hi = std::min(r_max, cap);
        if (r_min > r_hi) continue;

        const EdgeMap local = crop(edges, window);
        std::vector<double> nonzero;
        for (double v : local.data()) {
            if (v > 0.0) nonzero.push_back(v);
        }
        if (nonzero.empty()) continue;
        HoughParams hp;
        hp.r_min = r_min;
        hp.r_max = r_hi;
        hp.edge_threshold = otsu_threshold(nonzero);
        hp.vote_fraction = cfg.vote_fraction;
        const auto circles = hough_circles(local, hp);
        if (circles.empty()) continue;

        Circle best = circles.front();
        best.cx += window.x1;
        best.cy += window.y1;
        FaceDetection det;
        det.circle = best;
        det.bbox = circle_bbox(best, img.width(), img.height());
        det.confidence = face_confidence(img, skin, best);
        det.skin_region = reg;
        if (det.confidence < cfg.confidence_floor) continue;
        const double long_side = std::max(det.bbox.width(), det.bbox.height());
        const double short_side = std::min(det.bbox.width(), det.bbox.height());
        if (long_side > cfg.max_aspect * short_side) continue;
        if (best.r < r_min || best.r > r_max) continue;
        found.push_back(det);
    }
    std::stable_sort(found.begin(), found.end(), [](const FaceDetection& a, const FaceDetection& b) {
        return a.confidence > b.confidence;
    });
    if (static_cast<int>(found.size()) > cfg.max_faces) found.resize(cfg.max_faces);
    return found;
}

}  // namespace moodpipe
