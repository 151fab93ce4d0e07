#pragma once

// Image -> face -> feature masks -> feature vector, plus dataset helpers.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "moodpipe/config.hpp"
#include "moodpipe/error.hpp"
#include "moodpipe/facedetect.hpp"
#include "moodpipe/featextract.hpp"
#include "moodpipe/featvec.hpp"
#include "moodpipe/imgcore.hpp"
#include "moodpipe/svm.hpp"
#include "moodpipe/synthface.hpp"

namespace moodpipe {

struct FaceAnalysis {
    FaceDetection face;
    Rect crop_box;  // in image coordinates
    GrayImage crop;  // scale-normalized
    FeatureMasks masks;  // crop coordinates
    FeatureVector features;

    /// Map a point from crop pixels back to image pixels.
    Point2d to_image(Point2d p) const {
        const double sx = static_cast<double>(crop_box.width()) / crop.width();
        const double sy = static_cast<double>(crop_box.height()) / crop.height();
        return {crop_box.x1 + (p.x + 0.5) * sx - 0.5, crop_box.y1 + (p.y + 0.5) * sy - 0.5};
    }
};

/// Luma of a 3-channel image; the single channel otherwise.
inline GrayImage gray_of(const RasterImage& img) {
    if (img.channels() == 3) return to_grayscale(img);
    GrayImage g(img.width(), img.height());
    std::copy(img.data().begin(), img.data().end(), g.data().begin());
    return g;
}

/// Features from an explicit face box, bypassing detection.
inline FaceAnalysis analyze_box(const RasterImage& img, const Rect& box, const PipelineConfig& cfg) {
    const Rect bounds{0, 0, img.width() - 1, img.height() - 1};
    if (!box.valid() || intersect(box, bounds) != box) throw Error(ErrorKind::InvalidRect, "face box outside image");
    FaceAnalysis a;
    a.crop_box = box;
    a.crop = normalize_face_scale(crop(gray_of(img), box), cfg.band.face_size);
    a.masks = extract_all(a.crop, cfg.anthro, cfg.band);
    a.features = compute_feature_vector(a.masks, a.crop.bounds());
    return a;
}

/// Detect the most confident face and extract its features. Throws
/// NoFaceDetected when the detector finds nothing.
inline FaceAnalysis analyze_image(const RasterImage& img, const PipelineConfig& cfg) {
    const auto faces = detect_faces(img, cfg.detect);
    if (faces.empty()) throw Error(ErrorKind::NoFaceDetected, "no face found");
    FaceAnalysis a;
    a.face = faces.front();
    a.crop_box = a.face.bbox;
    a.crop = prepare_face_crop(to_grayscale(img), a.face.circle, a.face.bbox, cfg.band.face_size);
    a.masks = extract_all(a.crop, cfg.anthro, cfg.band);
    a.features = compute_feature_vector(a.masks, a.crop.bounds());
    return a;
}

// ---------------------------------------------------------------------------
// Batch extraction

struct FeatureRow {
    std::string path;
    Expression label;
    std::optional<FeatureVector> features;
    std::string failure;  // diagnostic when features is empty
};

/// Runs analyze_image on every manifest row. Rows are processed on up to
/// `threads` workers; results keep manifest order.
inline std::vector<FeatureRow> extract_dataset(const DatasetManifest& m, const PipelineConfig& cfg,
                                               unsigned threads = std::thread::hardware_concurrency()) {
    std::vector<FeatureRow> rows(m.rows.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            FeatureRow& r = rows[i];
            r.path = m.rows[i].path;
            r.label = m.rows[i].label;
            try {
                r.features = analyze_image(load_image(m.resolve(m.rows[i])), cfg).features;
            } catch (const Error& e) {
                r.failure = e.what();
                if (!e.detail().empty()) r.failure += " [" + e.detail() + "]";
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

inline std::vector<LabeledSample> to_samples(const std::vector<FeatureRow>& rows) {
    std::vector<LabeledSample> out;
    for (const auto& r : rows) {
        if (r.features) out.push_back({std::vector<double>(r.features->values.begin(), r.features->values.end()), r.label});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Feature cache CSV: `path,label,He,We,Hm,Wm,Rul,Rll,NL`

inline std::string feature_csv_header() {
    std::string h = "path,label";
    for (auto n : kFeatureNames) h += "," + std::string(n);
    return h;
}

inline void write_feature_csv(std::ostream& os, const std::vector<FeatureRow>& rows) {
    os << feature_csv_header() << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
        if (!r.features) continue;
        os << r.path << ',' << name_of(r.label);
        for (double v : r.features->values) os << ',' << v;
        os << '\n';
    }
}

inline std::vector<FeatureRow> read_feature_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != feature_csv_header()) {
        throw Error(ErrorKind::FormatError, "feature CSV must start with '" + feature_csv_header() + "'");
    }
    std::vector<FeatureRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(item);
        if (f.size() != 2 + kFeatureDim) throw Error(ErrorKind::FormatError, "feature CSV row has wrong field count");
        const auto label = parse_expression(f[1]);
        if (!label) throw Error(ErrorKind::FormatError, "unknown label '" + f[1] + "'");
        FeatureVector v;
        for (int k = 0; k < kFeatureDim; ++k) {
            try {
                std::size_t used = 0;
                v.values[k] = std::stod(f[2 + k], &used);
                if (used != f[2 + k].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw Error(ErrorKind::FormatError, "bad feature value '" + f[2 + k] + "'");
            }
        }
        rows.push_back({f[0], *label, v, {}});
    }
    return rows;
}

}  // namespace moodpipe
