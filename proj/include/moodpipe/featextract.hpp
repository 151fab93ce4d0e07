#pragma once

// Edge-projection localisation of eyebrows, lips and the nose reference
// row inside a face crop.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "moodpipe/error.hpp"
#include "moodpipe/image.hpp"
#include "moodpipe/imgcore.hpp"

namespace moodpipe {

enum class FeatureId { LeftEyebrow = 0, RightEyebrow, Lip, Nose };

inline std::string_view feature_name(FeatureId f) {
    switch (f) {
        case FeatureId::LeftEyebrow: return "left_eyebrow";
        case FeatureId::RightEyebrow: return "right_eyebrow";
        case FeatureId::Lip: return "lip";
        case FeatureId::Nose: return "nose";
    }
    return "?";
}

/// Search box as fractions of the face bounding box, plus the expected
/// feature row (fraction of face height) used for tie-breaking and weighting.
struct FractionalBox {
    double x1f = 0.0;
    double y1f = 0.0;
    double x2f = 1.0;
    double y2f = 1.0;
    double prior_yf = 0.5;
};

struct AnthropometricModel {
    FractionalBox left_eyebrow{0.1, 0.15, 0.5, 0.45, 0.27};
    FractionalBox right_eyebrow{0.5, 0.15, 0.9, 0.45, 0.27};
    FractionalBox lip{0.2, 0.65, 0.8, 0.95, 0.8};
    FractionalBox nose{0.3, 0.45, 0.7, 0.7, 0.59};

    const FractionalBox& box(FeatureId f) const {
        switch (f) {
            case FeatureId::LeftEyebrow: return left_eyebrow;
            case FeatureId::RightEyebrow: return right_eyebrow;
            case FeatureId::Lip: return lip;
            case FeatureId::Nose: return nose;
        }
        return lip;
    }

    void validate() const {
        for (FeatureId f : {FeatureId::LeftEyebrow, FeatureId::RightEyebrow, FeatureId::Lip, FeatureId::Nose}) {
            const auto& b = box(f);
            const bool unit = b.x1f >= 0.0 && b.y1f >= 0.0 && b.x2f <= 1.0 && b.y2f <= 1.0 &&
                              b.x1f < b.x2f && b.y1f < b.y2f && b.prior_yf >= 0.0 && b.prior_yf <= 1.0;
            if (!unit) {
                throw Error(ErrorKind::ConfigError,
                            "anthropometric box for " + std::string(feature_name(f)) + " must lie in the unit square");
            }
        }
        if (left_eyebrow.y2f > 0.5 || right_eyebrow.y2f > 0.5) {
            throw Error(ErrorKind::ConfigError, "eyebrow boxes must lie in the upper half of the face");
        }
        const double brow_bottom = std::max(left_eyebrow.y2f, right_eyebrow.y2f);
        if (nose.y1f < brow_bottom || nose.y2f > lip.y2f || nose.y1f > lip.y1f) {
            throw Error(ErrorKind::ConfigError, "nose box must lie between the eyebrow and lip boxes");
        }
    }
};

enum class BandWeighting { Uniform, Gaussian };

struct BandParams {
    int n_regions = 5;
    BandWeighting weighting = BandWeighting::Uniform;
    int median_window = 3;
    double smooth_sigma = 2.0;
    double log_sigma = 1.5;
    int brow_se_a = 4;
    int brow_se_b = 1;
    int lip_se_a = 3;
    int lip_se_b = 2;
    int face_size = 0;  // crop width after resampling; 0 keeps native pixels

    void validate() const {
        if (face_size != 0 && face_size < 32) throw Error(ErrorKind::ConfigError, "face_size must be 0 or >= 32");
        if (n_regions < 2) throw Error(ErrorKind::ConfigError, "n_regions must be >= 2");
        if (median_window < 3 || median_window % 2 == 0) {
            throw Error(ErrorKind::ConfigError, "band median window must be odd and >= 3");
        }
        if (!(smooth_sigma > 0.0) || !(log_sigma > 0.0)) throw Error(ErrorKind::ConfigError, "sigmas must be positive");
        if (brow_se_a < 1 || brow_se_b < 1 || lip_se_a < 1 || lip_se_b < 1) {
            throw Error(ErrorKind::ConfigError, "structuring element axes must be >= 1");
        }
    }
};

/// Scale a fractional box into the pixel frame of `face_bbox`.
inline Rect anthropometric_box(const Rect& face_bbox, FeatureId feature, const AnthropometricModel& model) {
    if (face_bbox.width() < 32 || face_bbox.height() < 32) {
        throw Error(ErrorKind::FaceTooSmall, "face box must be at least 32x32 pixels");
    }
    const auto& b = model.box(feature);
    const double w = face_bbox.width();
    const double h = face_bbox.height();
    Rect r{face_bbox.x1 + static_cast<int>(std::lround(b.x1f * w)),
           face_bbox.y1 + static_cast<int>(std::lround(b.y1f * h)),
           face_bbox.x1 + static_cast<int>(std::lround(b.x2f * w)) - 1,
           face_bbox.y1 + static_cast<int>(std::lround(b.y2f * h)) - 1};
    r = intersect(r, face_bbox);
    if (!r.valid()) throw Error(ErrorKind::FaceTooSmall, "anthropometric box collapsed");
    return r;
}

// ---------------------------------------------------------------------------
// Band scoring

struct RegionScore {
    int index = 0;
    double e = 0.0;
    Rect band;
};

struct BandLocation {
    RegionScore winner;
    std::vector<RegionScore> scores;
    std::vector<double> profile;  // smoothed H(y) over the search rows
};

/// Split the search rows into equal bands and score each by its share of
/// the weighted, smoothed horizontal projection. `prior_yf` is a fraction
/// of the edge map height.
inline BandLocation locate_feature_band(const EdgeMap& edge, const Rect& search, const BandParams& bp,
                                        double prior_yf) {
    if (bp.n_regions < 2) throw Error(ErrorKind::InvalidParams, "n_regions must be >= 2");
    const auto proj = integral_projections(edge, search);
    const auto med = median_filter_1d(proj.horizontal, bp.median_window);
    BandLocation out;
    out.profile = gaussian_smooth_1d(med, bp.smooth_sigma);

    const int len = search.height();
    const int n = std::min(bp.n_regions, len);
    const double prior_row = prior_yf * edge.height();
    const double band_h = static_cast<double>(len) / n;
    double total = 0.0;
    std::vector<double> raw(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const int b0 = (i * len) / n;
        const int b1 = ((i + 1) * len) / n;
        RegionScore s;
        s.index = i;
        s.band = Rect{search.x1, search.y1 + b0, search.x2, search.y1 + b1 - 1};
        for (int k = b0; k < b1; ++k) {
            double w = 1.0;
            if (bp.weighting == BandWeighting::Gaussian) {
                const double d = (search.y1 + k - prior_row) / band_h;
                w = std::exp(-0.5 * d * d);
            }
            raw[i] += out.profile[k] * w;
        }
        total += raw[i];
        out.scores.push_back(s);
    }
    if (!(total > 0.0)) throw Error(ErrorKind::NoFeatureEvidence, "no edge evidence in search box");
    for (int i = 0; i < n; ++i) out.scores[i].e = raw[i] / total;

    const double best = std::max_element(out.scores.begin(), out.scores.end(), [](const auto& a, const auto& b) {
                            return a.e < b.e;
                        })->e;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& s : out.scores) {
        if (best - s.e > 1e-12) continue;
        const double center = 0.5 * (s.band.y1 + s.band.y2);
        const double d = std::abs(center - prior_row);
        if (d < best_dist) {
            best_dist = d;
            out.winner = s;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-feature extraction

struct EyebrowResult {
    BinaryMask mask;  // face-crop coordinates
    BandLocation band;
};

struct LipResult {
    BinaryMask mask;
    Point2d left_corner, right_corner;
    Point2d top_mid, bottom_mid;
    BandLocation band;
};

struct NoseResult {
    int nose_y = 0;
    std::vector<double> profile;
};

namespace detail {

inline BinaryMask paste(const BinaryMask& local, const Rect& at, int width, int height) {
    BinaryMask out(width, height);
    for (int y = 0; y < local.height(); ++y) {
        for (int x = 0; x < local.width(); ++x) {
            if (local.test(x, y)) out.set(at.x1 + x, at.y1 + y);
        }
    }
    return out;
}

inline bool rows_overlap(const Rect& a, int y1, int y2) { return a.y1 <= y2 && a.y2 >= y1; }

/// Exact dark-pixel mask for a coarse feature region: Otsu on the
/// intensities of the region grown by `reach` pixels, keeping the dark
/// components that touch the coarse region (or, with `touching_only`
/// false, every dark component in the grown region). Returns `coarse`
/// unchanged when the intensities do not separate.
inline BinaryMask refine_dark(const BinaryMask& coarse, const GrayImage& gray, int reach, bool touching_only) {
    const BinaryMask grown = morph(coarse, MorphOp::Dilate, reach, reach);
    std::vector<double> values;
    for (std::size_t i = 0; i < grown.data().size(); ++i) {
        if (grown.data()[i]) values.push_back(gray.data()[i]);
    }
    if (values.empty()) return coarse;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) return coarse;
    const double thr = otsu_threshold(values);
    BinaryMask dark(coarse.width(), coarse.height());
    for (std::size_t i = 0; i < dark.data().size(); ++i) dark.data()[i] = grown.data()[i] && gray.data()[i] <= thr;
    const Labeling lab = label_components(dark, 8);
    BinaryMask out(coarse.width(), coarse.height());
    std::vector<char> keep(lab.regions.size() + 1, touching_only ? 0 : 1);
    for (std::size_t i = 0; i < coarse.data().size(); ++i) {
        if (coarse.data()[i] && lab.labels.data()[i] > 0) keep[lab.labels.data()[i]] = 1;
    }
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        const int l = lab.labels.data()[i];
        if (l > 0 && keep[l]) out.data()[i] = 1;
    }
    return out.none() ? coarse : out;
}

inline Rect band_window(const BandLocation& loc, const Rect& search) {
    const int h = loc.winner.band.height();
    return Rect{search.x1, std::max(search.y1, loc.winner.band.y1 - h), search.x2,
                std::min(search.y2, loc.winner.band.y2 + h)};
}

}  // namespace detail

/// Eyebrow mask for one side: horizontal-edge band search, LoG contours
/// filled and closed with a horizontally stretched ellipse, the higher of
/// the two largest regions meeting the band, refined to its dark pixels.
inline EyebrowResult extract_eyebrow(const GrayImage& face_crop, FeatureId side, const AnthropometricModel& model,
                                     const BandParams& bp = {}) {
    if (side != FeatureId::LeftEyebrow && side != FeatureId::RightEyebrow) {
        throw Error(ErrorKind::InvalidParams, "extract_eyebrow needs an eyebrow side");
    }
    const Rect box = anthropometric_box(face_crop.bounds(), side, model);
    const EdgeMap edge = sobel_edges(face_crop, SobelOrientation::Horizontal);
    EyebrowResult res;
    try {
        res.band = locate_feature_band(edge, box, bp, model.box(side).prior_yf);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoFeatureEvidence) {
            throw Error(ErrorKind::FeatureNotFound, "no edges in eyebrow box", std::string(feature_name(side)));
        }
        throw;
    }
    const Rect win = detail::band_window(res.band, box);

    const GrayImage local = crop(face_crop, box);
    BinaryMask blobs = fill_contours(log_zero_contours(local, bp.log_sigma));
    blobs = morph(blobs, MorphOp::Close, bp.brow_se_a, bp.brow_se_b);
    const Labeling lab = label_components(blobs, 8);

    std::vector<const Region*> cands;
    for (const auto& r : lab.regions) {
        const Rect global{r.bbox.x1 + box.x1, r.bbox.y1 + box.y1, r.bbox.x2 + box.x1, r.bbox.y2 + box.y1};
        if (detail::rows_overlap(global, win.y1, win.y2)) cands.push_back(&r);
        if (cands.size() == 2) break;
    }
    if (cands.empty()) {
        throw Error(ErrorKind::FeatureNotFound, "no eyebrow region after morphology", std::string(feature_name(side)));
    }
    const Region* pick = cands.front();
    if (cands.size() == 2 && cands[1]->centroid.y < cands[0]->centroid.y) pick = cands[1];
    res.mask = detail::refine_dark(
        detail::paste(region_mask(lab, pick->label), box, face_crop.width(), face_crop.height()), face_crop, 2, true);
    return res;
}

/// Lip mask from fused horizontal and vertical edges, refined to the dark
/// mouth pixels. Corner and midline points sit on the outer pixel edges of
/// the mask, so they scale exactly with the image.
inline LipResult extract_lip(const GrayImage& face_crop, const AnthropometricModel& model, const BandParams& bp = {}) {
    const Rect box = anthropometric_box(face_crop.bounds(), FeatureId::Lip, model);
    const EdgeMap eh = sobel_edges(face_crop, SobelOrientation::Horizontal);
    const EdgeMap ev = sobel_edges(face_crop, SobelOrientation::Vertical);
    EdgeMap edge(face_crop.width(), face_crop.height());
    for (std::size_t i = 0; i < edge.data().size(); ++i) edge.data()[i] = std::max(eh.data()[i], ev.data()[i]);

    const auto lip_error = [](const char* msg) {
        return Error(ErrorKind::FeatureNotFound, msg, std::string(feature_name(FeatureId::Lip)));
    };
    LipResult res;
    try {
        res.band = locate_feature_band(edge, box, bp, model.lip.prior_yf);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoFeatureEvidence) throw lip_error("no edges in lip box");
        throw;
    }
    const Rect win = detail::band_window(res.band, box);

    const EdgeMap local = crop(edge, box);
    std::vector<double> nonzero;
    for (double v : local.data()) {
        if (v > 0.0) nonzero.push_back(v);
    }
    const double thr = otsu_threshold(nonzero);
    BinaryMask bin(local.width(), local.height());
    for (std::size_t i = 0; i < bin.data().size(); ++i) bin.data()[i] = local.data()[i] > thr;
    bin = fill_contours(morph(bin, MorphOp::Close, bp.lip_se_a, bp.lip_se_b));
    const Labeling lab = label_components(bin, 8);
    const Region* pick = nullptr;
    for (const auto& r : lab.regions) {
        const Rect global{r.bbox.x1 + box.x1, r.bbox.y1 + box.y1, r.bbox.x2 + box.x1, r.bbox.y2 + box.y1};
        if (detail::rows_overlap(global, win.y1, win.y2)) {
            pick = &r;
            break;
        }
    }
    if (pick == nullptr) throw lip_error("no lip region near the located band");
    res.mask = detail::refine_dark(
        detail::paste(region_mask(lab, pick->label), box, face_crop.width(), face_crop.height()), face_crop, 2, false);

    const Region reg = mask_region(res.mask);
    const int xl = reg.bbox.x1;
    const int xr = reg.bbox.x2;
    int yl = -1, yr = -1;
    for (int y = reg.bbox.y1; y <= reg.bbox.y2; ++y) {
        if (res.mask.test(xl, y)) yl = y;  // ties resolve to the lower pixel
        if (res.mask.test(xr, y)) yr = y;
    }
    res.left_corner = {xl - 0.5, static_cast<double>(yl)};
    res.right_corner = {xr + 0.5, static_cast<double>(yr)};

    const double mid = 0.5 * (xl + xr);
    const double half_band = 0.1 * (xr - xl + 1);
    double sx = 0.0, top = 0.0, bottom = 0.0;
    int cols = 0;
    for (int x = xl; x <= xr; ++x) {
        if (std::abs(x - mid) > half_band) continue;
        int t = -1, b = -1;
        for (int y = reg.bbox.y1; y <= reg.bbox.y2; ++y) {
            if (!res.mask.test(x, y)) continue;
            if (t < 0) t = y;
            b = y;
        }
        if (t < 0) continue;
        sx += x;
        top += t;
        bottom += b;
        ++cols;
    }
    if (cols == 0) throw lip_error("lip mask has no center columns");
    res.top_mid = {sx / cols, top / cols - 0.5};
    res.bottom_mid = {sx / cols, bottom / cols + 0.5};
    return res;
}

/// Nose reference row: peak of the smoothed vertical-edge row projection.
inline NoseResult extract_nose_ref(const GrayImage& face_crop, const AnthropometricModel& model,
                                   const BandParams& bp = {}) {
    const Rect box = anthropometric_box(face_crop.bounds(), FeatureId::Nose, model);
    const EdgeMap edge = sobel_edges(face_crop, SobelOrientation::Vertical);
    const auto proj = integral_projections(edge, box);
    NoseResult res;
    res.profile = gaussian_smooth_1d(median_filter_1d(proj.horizontal, bp.median_window), bp.smooth_sigma);
    const double peak = *std::max_element(res.profile.begin(), res.profile.end());
    if (!(peak > 0.0)) {
        throw Error(ErrorKind::FeatureNotFound, "no vertical edges in nose box", std::string(feature_name(FeatureId::Nose)));
    }
    const double prior_row = model.nose.prior_yf * face_crop.height();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < res.profile.size(); ++k) {
        if (peak - res.profile[k] > 1e-9 * peak) continue;
        const int row = box.y1 + static_cast<int>(k);
        const double d = std::abs(row - prior_row);
        if (d < best_dist) {
            best_dist = d;
            res.nose_y = row;
        }
    }
    return res;
}

struct FeatureMasks {
    BinaryMask left_eyebrow, right_eyebrow, lip;  // face-crop coordinates
    int nose_y = 0;
    Point2d lip_left_corner, lip_right_corner;
    Point2d lip_top_mid, lip_bottom_mid;
    std::array<BandLocation, 3> bands;  // left eyebrow, right eyebrow, lip
};

inline FeatureMasks extract_all(const GrayImage& face_crop, const AnthropometricModel& model,
                                const BandParams& bp = {}) {
    FeatureMasks fm;
    auto left = extract_eyebrow(face_crop, FeatureId::LeftEyebrow, model, bp);
    auto right = extract_eyebrow(face_crop, FeatureId::RightEyebrow, model, bp);
    const auto nose = extract_nose_ref(face_crop, model, bp);
    auto lip = extract_lip(face_crop, model, bp);
    fm.left_eyebrow = std::move(left.mask);
    fm.right_eyebrow = std::move(right.mask);
    fm.lip = std::move(lip.mask);
    fm.nose_y = nose.nose_y;
    fm.lip_left_corner = lip.left_corner;
    fm.lip_right_corner = lip.right_corner;
    fm.lip_top_mid = lip.top_mid;
    fm.lip_bottom_mid = lip.bottom_mid;
    fm.bands = {std::move(left.band), std::move(right.band), std::move(lip.band)};
    return fm;
}

/// Resample a face crop so its width is `face_size` (height keeps the
/// aspect ratio). All pixel-sized extraction parameters then act at one scale.
inline GrayImage normalize_face_scale(const GrayImage& face, int face_size) {
    if (face_size == 0 || face_size == face.width()) return face;
    const int h = std::max(1, static_cast<int>(std::lround(static_cast<double>(face.height()) * face_size / face.width())));
    return resample_area(face, face_size, h);
}

/// Face crop for extraction: the bbox region of `gray`, with everything
/// outside the slightly shrunken face circle replaced by the median
/// intensity inside it, so the head outline contributes no edges; then
/// normalized to `face_size`.
inline GrayImage prepare_face_crop(const GrayImage& gray, const Circle& face, const Rect& bbox, int face_size = 0) {
    GrayImage out = crop(gray, bbox);
    const double margin = std::max(2.0, 0.04 * face.r);
    const double keep = face.r - margin;
    const double keep2 = keep * keep;
    std::vector<std::uint8_t> inside;
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            const double dx = bbox.x1 + x - face.cx;
            const double dy = bbox.y1 + y - face.cy;
            if (dx * dx + dy * dy <= keep2) inside.push_back(out(x, y));
        }
    }
    if (inside.empty()) return out;
    auto mid = inside.begin() + static_cast<std::ptrdiff_t>(inside.size() / 2);
    std::nth_element(inside.begin(), mid, inside.end());
    const std::uint8_t fill = *mid;
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            const double dx = bbox.x1 + x - face.cx;
            const double dy = bbox.y1 + y - face.cy;
            if (dx * dx + dy * dy > keep2) out(x, y) = fill;
        }
    }
    return normalize_face_scale(out, face_size);
}

}  // namespace moodpipe
