#pragma once

// Parametric cartoon-face renderer with exact ground truth. Serves as the
// training corpus and as the verification oracle for every pipeline stage.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "moodpipe/error.hpp"
#include "moodpipe/expression.hpp"
#include "moodpipe/image.hpp"
#include "moodpipe/imgcore.hpp"
#include "moodpipe/random.hpp"

namespace moodpipe {

/// Closed interval of a shape fraction; jitter is expressed relative to it.
struct ParamRange {
    double lo;
    double hi;
    double span() const { return hi - lo; }
    bool contains(double v) const { return v >= lo - 1e-12 && v <= hi + 1e-12; }
};

namespace face_ranges {
inline constexpr ParamRange brow_elevation{0.34, 0.60};
inline constexpr ParamRange brow_arch{-0.03, 0.03};
inline constexpr ParamRange brow_tilt{-0.08, 0.08};
inline constexpr ParamRange brow_gap{0.20, 0.42};
inline constexpr ParamRange eye_size{0.8, 1.2};
inline constexpr ParamRange mouth_width{0.5, 1.05};
inline constexpr ParamRange mouth_openness{0.06, 0.32};
inline constexpr ParamRange mouth_lift{-0.3, 0.3};
inline constexpr ParamRange nose_offset{-0.1, 0.1};
}  // namespace face_ranges

// Fixed layout, in units of the head radius, relative to the head center.
namespace face_layout {
inline constexpr double brow_length = 0.45;
inline constexpr double brow_half_thickness = 0.03;
inline constexpr double eye_row = -0.19;
inline constexpr double eye_half_width = 0.12;
inline constexpr double eye_half_height = 0.055;
inline constexpr double nose_row = 0.18;
inline constexpr double nose_half_width = 0.08;
inline constexpr double nose_half_thickness = 0.025;
inline constexpr double mouth_row = 0.6;
inline constexpr double lip_line_half_thickness = 0.015;  // keeps closed corners >= 2 px thick
}  // namespace face_layout

/// Geometry of one rendered face. Fractions are in units of head_r;
/// elevation is measured upward from the head center, lift is positive
/// for upturned mouth corners.
struct FaceParams {
    int width = 256;
    int height = 256;
    int head_cx = 128;
    int head_cy = 128;
    int head_r = 88;
    Rgb skin{219, 172, 152};
    Rgb background{60, 90, 170};
    Rgb ink{45, 45, 45};

    double brow_elevation = 0.46;
    double brow_arch = 0.01;
    double brow_tilt = 0.0;  // positive raises the inner ends
    double brow_gap = 0.32;
    double eye_size = 1.0;
    double mouth_width = 0.75;
    double mouth_openness = 0.09;
    double mouth_lift = 0.0;
    double nose_offset = 0.0;  // positive moves the nose down

    void validate() const {
        if (width < 32 || height < 32) throw Error(ErrorKind::InvalidParams, "image too small");
        if (head_r < 16) throw Error(ErrorKind::InvalidParams, "head radius must be >= 16");
        if (head_cx - head_r < 0 || head_cy - head_r < 0 || head_cx + head_r >= width ||
            head_cy + head_r >= height) {
            throw Error(ErrorKind::InvalidParams, "head circle must lie inside the image");
        }
        const auto check = [](double v, ParamRange r, const char* name) {
            if (!r.contains(v)) throw Error(ErrorKind::InvalidParams, std::string(name) + " out of range");
        };
        check(brow_elevation, face_ranges::brow_elevation, "brow_elevation");
        check(brow_arch, face_ranges::brow_arch, "brow_arch");
        check(brow_tilt, face_ranges::brow_tilt, "brow_tilt");
        check(brow_gap, face_ranges::brow_gap, "brow_gap");
        check(eye_size, face_ranges::eye_size, "eye_size");
        check(mouth_width, face_ranges::mouth_width, "mouth_width");
        check(mouth_openness, face_ranges::mouth_openness, "mouth_openness");
        check(mouth_lift, face_ranges::mouth_lift, "mouth_lift");
        check(nose_offset, face_ranges::nose_offset, "nose_offset");
    }

    friend bool operator==(const FaceParams&, const FaceParams&) = default;
};

struct SynthFaceTruth {
    Rect bbox;  // square around the head circle
    Circle head;
    BinaryMask left_brow, right_brow, left_eye, right_eye, nose, mouth;  // image coordinates
    Point2d left_brow_centroid, right_brow_centroid, mouth_centroid;
    double nose_row = 0.0;  // mean row of the nose mark
    double mouth_top_mid = 0.0;     // upper boundary row at the mouth midline
    double mouth_bottom_mid = 0.0;  // lower boundary row at the mouth midline
    double mouth_left = 0.0, mouth_right = 0.0;  // corner columns
    std::optional<Expression> label;
    FaceParams params;
};

namespace detail {

inline Point2d mask_centroid(const BinaryMask& m) { return mask_region(m).centroid; }

}  // namespace detail

/// Draw a face onto an existing 3-channel canvas and return its truth.
inline SynthFaceTruth render_face_onto(RasterImage& canvas, const FaceParams& p) {
    p.validate();
    if (canvas.width() != p.width || canvas.height() != p.height || canvas.channels() != 3) {
        throw Error(ErrorKind::InvalidParams, "canvas does not match params");
    }
    namespace L = face_layout;
    const double R = p.head_r;
    const double cx = p.head_cx;
    const double cy = p.head_cy;
    const int W = p.width;
    const int H = p.height;

    SynthFaceTruth t;
    t.params = p;
    t.head = Circle{p.head_cx, p.head_cy, p.head_r, 0.0};
    t.bbox = Rect{p.head_cx - p.head_r, p.head_cy - p.head_r, p.head_cx + p.head_r, p.head_cy + p.head_r};
    t.left_brow = t.right_brow = t.left_eye = t.right_eye = t.nose = t.mouth = BinaryMask(W, H);

    const double r2 = R * R;
    for (int y = t.bbox.y1; y <= t.bbox.y2; ++y) {
        for (int x = t.bbox.x1; x <= t.bbox.x2; ++x) {
            const double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy <= r2) canvas.set_rgb(x, y, p.skin);
        }
    }

    const double eye_cx = p.brow_gap / 2.0 + L::brow_length / 2.0;
    const double eye_a = L::eye_half_width * p.eye_size;
    const double eye_b = L::eye_half_height * p.eye_size;
    const double hw = p.mouth_width / 2.0;
    const double my = L::mouth_row;
    const double half_open = p.mouth_openness / 2.0;
    const double ny = L::nose_row + p.nose_offset;

    for (int y = t.bbox.y1; y <= t.bbox.y2; ++y) {
        for (int x = t.bbox.x1; x <= t.bbox.x2; ++x) {
            const double u = (x - cx) / R;
            const double v = (y - cy) / R;

            // Eyebrows: a thick band around an arched, tilted centerline.
            const double tb = (std::abs(u) - p.brow_gap / 2.0) / L::brow_length;
            if (tb >= 0.0 && tb <= 1.0) {
                const double arch = 1.0 - (2.0 * tb - 1.0) * (2.0 * tb - 1.0);
                const double yc = -p.brow_elevation - p.brow_arch * arch - p.brow_tilt * (0.5 - tb);
                if (std::abs(v - yc) <= L::brow_half_thickness) (u < 0 ? t.left_brow : t.right_brow).set(x, y);
            }
            // Eyes.
            for (int side : {-1, 1}) {
                const double eu = (u - side * eye_cx) / eye_a;
                const double ev = (v - L::eye_row) / eye_b;
                if (eu * eu + ev * ev <= 1.0) (side < 0 ? t.left_eye : t.right_eye).set(x, y);
            }
            // Nose mark.
            if (std::abs(u) <= L::nose_half_width && std::abs(v - ny) <= L::nose_half_thickness) t.nose.set(x, y);
            // Mouth: region between two parabolas meeting at the corners,
            // never thinner than the lip line.
            if (std::abs(u) <= hw) {
                const double s2 = (u / hw) * (u / hw);
                const double upper = my - half_open + (-p.mouth_lift + half_open) * s2;
                const double lower = my + half_open + (-p.mouth_lift - half_open) * s2;
                const double mid = 0.5 * (upper + lower);
                const double top = std::min(upper, mid - L::lip_line_half_thickness);
                const double bottom = std::max(lower, mid + L::lip_line_half_thickness);
                if (v >= top && v <= bottom) t.mouth.set(x, y);
            }
        }
    }
    for (const BinaryMask* m : {&t.left_brow, &t.right_brow, &t.left_eye, &t.right_eye, &t.nose, &t.mouth}) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                if (m->test(x, y)) canvas.set_rgb(x, y, p.ink);
            }
        }
    }

    t.left_brow_centroid = detail::mask_centroid(t.left_brow);
    t.right_brow_centroid = detail::mask_centroid(t.right_brow);
    t.mouth_centroid = detail::mask_centroid(t.mouth);
    t.nose_row = detail::mask_centroid(t.nose).y;
    t.mouth_top_mid = cy + (my - half_open) * R;
    t.mouth_bottom_mid = cy + (my + half_open) * R;
    t.mouth_left = cx - hw * R;
    t.mouth_right = cx + hw * R;
    return t;
}

inline std::pair<RasterImage, SynthFaceTruth> render_face(const FaceParams& p) {
    p.validate();
    RasterImage img(p.width, p.height, p.background);
    auto truth = render_face_onto(img, p);
    return {std::move(img), std::move(truth)};
}

/// Neutral face of the default layout, centered in a square image.
inline FaceParams neutral_params(int image_size = 256) {
    FaceParams p;
    p.width = p.height = image_size;
    p.head_cx = p.head_cy = image_size / 2;
    p.head_r = static_cast<int>(std::lround(0.344 * image_size));
    return p;
}

/// Base geometry of each expression prototype.
inline FaceParams expression_base(Expression e, int image_size = 256) {
    FaceParams p = neutral_params(image_size);
    switch (e) {
        case Expression::Joy:
            p.brow_elevation = 0.47; p.brow_arch = 0.015; p.brow_tilt = 0.0; p.brow_gap = 0.33;
            p.eye_size = 0.9; p.mouth_width = 0.95; p.mouth_openness = 0.12; p.mouth_lift = 0.15;
            p.nose_offset = 0.0;
            break;
        case Expression::Surprise:
            p.brow_elevation = 0.56; p.brow_arch = 0.02; p.brow_tilt = 0.0; p.brow_gap = 0.34;
            p.eye_size = 1.15; p.mouth_width = 0.55; p.mouth_openness = 0.28; p.mouth_lift = 0.0;
            p.nose_offset = 0.0;
            break;
        case Expression::Anger:
            p.brow_elevation = 0.38; p.brow_arch = -0.01; p.brow_tilt = -0.06; p.brow_gap = 0.24;
            p.eye_size = 0.9; p.mouth_width = 0.62; p.mouth_openness = 0.07; p.mouth_lift = -0.02;
            p.nose_offset = 0.0;
            break;
        case Expression::Sadness:
            p.brow_elevation = 0.48; p.brow_arch = 0.0; p.brow_tilt = 0.06; p.brow_gap = 0.32;
            p.eye_size = 0.9; p.mouth_width = 0.7; p.mouth_openness = 0.09; p.mouth_lift = -0.14;
            p.nose_offset = 0.0;
            break;
        case Expression::Fear:
            p.brow_elevation = 0.54; p.brow_arch = 0.01; p.brow_tilt = 0.03; p.brow_gap = 0.28;
            p.eye_size = 1.1; p.mouth_width = 0.6; p.mouth_openness = 0.17; p.mouth_lift = -0.06;
            p.nose_offset = 0.0;
            break;
        case Expression::Disgust:
            p.brow_elevation = 0.39; p.brow_arch = 0.0; p.brow_tilt = -0.03; p.brow_gap = 0.30;
            p.eye_size = 0.85; p.mouth_width = 0.82; p.mouth_openness = 0.10; p.mouth_lift = -0.10;
            p.nose_offset = -0.06;
            break;
    }
    return p;
}

/// Expression prototype with every shape fraction perturbed uniformly by
/// up to +-jitter times its range, plus a seeded head placement. Jitter 0
/// reproduces the base prototype for any seed.
inline FaceParams expression_preset(Expression e, double jitter, std::uint64_t seed, int image_size = 256) {
    if (jitter < 0.0 || jitter > 0.5) throw Error(ErrorKind::InvalidParams, "jitter must lie in [0, 0.5]");
    FaceParams p = expression_base(e, image_size);
    if (jitter == 0.0) return p;
    Rng rng(seed);
    const auto perturb = [&](double& v, ParamRange r) {
        v = std::clamp(v + rng.uniform(-1.0, 1.0) * jitter * r.span(), r.lo, r.hi);
    };
    namespace FR = face_ranges;
    perturb(p.brow_elevation, FR::brow_elevation);
    perturb(p.brow_arch, FR::brow_arch);
    perturb(p.brow_tilt, FR::brow_tilt);
    perturb(p.brow_gap, FR::brow_gap);
    perturb(p.eye_size, FR::eye_size);
    perturb(p.mouth_width, FR::mouth_width);
    perturb(p.mouth_openness, FR::mouth_openness);
    perturb(p.mouth_lift, FR::mouth_lift);
    perturb(p.nose_offset, FR::nose_offset);

    const double r_scale = 1.0 + rng.uniform(-1.0, 1.0) * jitter * 0.2;
    p.head_r = static_cast<int>(std::lround(p.head_r * r_scale));
    const int slack = std::max(0, image_size / 2 - p.head_r - 2);
    const double shift = jitter * 2.0 * slack;
    p.head_cx = image_size / 2 + static_cast<int>(std::lround(rng.uniform(-1.0, 1.0) * std::min<double>(shift, slack)));
    p.head_cy = image_size / 2 + static_cast<int>(std::lround(rng.uniform(-1.0, 1.0) * std::min<double>(shift, slack)));
    return p;
}

// ---------------------------------------------------------------------------
// Truth sidecars and corpora

inline std::string truth_to_text(const SynthFaceTruth& t) {
    std::ostringstream os;
    os << std::setprecision(17);
    const auto& p = t.params;
    os << "label=" << (t.label ? std::string(name_of(*t.label)) : std::string("Neutral")) << '\n'
       << "bbox=" << t.bbox.x1 << ' ' << t.bbox.y1 << ' ' << t.bbox.x2 << ' ' << t.bbox.y2 << '\n'
       << "head=" << t.head.cx << ' ' << t.head.cy << ' ' << t.head.r << '\n'
       << "left_brow_centroid=" << t.left_brow_centroid.x << ' ' << t.left_brow_centroid.y << '\n'
       << "right_brow_centroid=" << t.right_brow_centroid.x << ' ' << t.right_brow_centroid.y << '\n'
       << "mouth_centroid=" << t.mouth_centroid.x << ' ' << t.mouth_centroid.y << '\n'
       << "nose_row=" << t.nose_row << '\n'
       << "image_size=" << p.width << ' ' << p.height << '\n'
       << "brow_elevation=" << p.brow_elevation << '\n'
       << "brow_arch=" << p.brow_arch << '\n'
       << "brow_tilt=" << p.brow_tilt << '\n'
       << "brow_gap=" << p.brow_gap << '\n'
       << "eye_size=" << p.eye_size << '\n'
       << "mouth_width=" << p.mouth_width << '\n'
       << "mouth_openness=" << p.mouth_openness << '\n'
       << "mouth_lift=" << p.mouth_lift << '\n'
       << "nose_offset=" << p.nose_offset << '\n';
    return os.str();
}

struct ManifestRow {
    std::string path;  // relative to the manifest's directory
    Expression label;
    friend bool operator==(const ManifestRow&, const ManifestRow&) = default;
};

struct DatasetManifest {
    std::filesystem::path base_dir;
    std::vector<ManifestRow> rows;

    std::filesystem::path resolve(const ManifestRow& row) const { return base_dir / row.path; }
};

inline void write_manifest(const std::filesystem::path& file, const DatasetManifest& m) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + file.string());
    out << "path,label\n";
    for (const auto& r : m.rows) out << r.path << ',' << name_of(r.label) << '\n';
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + file.string());
}

inline DatasetManifest read_manifest(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + file.string());
    DatasetManifest m;
    m.base_dir = file.parent_path();
    std::string line;
    if (!std::getline(in, line) || line != "path,label") {
        throw Error(ErrorKind::FormatError, "manifest must start with 'path,label'");
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) {
            throw Error(ErrorKind::FormatError, "manifest line " + std::to_string(lineno) + " has no label");
        }
        const auto label = parse_expression(line.substr(comma + 1));
        if (!label) {
            throw Error(ErrorKind::FormatError, "unknown label on manifest line " + std::to_string(lineno));
        }
        m.rows.push_back({line.substr(0, comma), *label});
    }
    return m;
}

/// Render 6 * n_per_class labelled faces with truth sidecars and write
/// `manifest.csv` into out_dir. Output depends only on the arguments.
inline DatasetManifest generate_corpus(int n_per_class, double jitter, std::uint64_t seed,
                                       const std::filesystem::path& out_dir, int image_size = 256) {
    if (n_per_class < 1) throw Error(ErrorKind::InvalidParams, "n_per_class must be >= 1");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw Error(ErrorKind::IoError, "cannot create directory " + out_dir.string());
    }
    DatasetManifest manifest;
    manifest.base_dir = out_dir;
    for (Expression e : kAllExpressions) {
        for (int i = 0; i < n_per_class; ++i) {
            const auto item_seed = derive_seed(seed, static_cast<std::uint64_t>(index_of(e)), static_cast<std::uint64_t>(i));
            const FaceParams p = expression_preset(e, jitter, item_seed, image_size);
            auto [img, truth] = render_face(p);
            truth.label = e;
            std::ostringstream stem;
            stem << name_of(e) << '_' << std::setw(4) << std::setfill('0') << i;
            save_image(out_dir / (stem.str() + ".ppm"), img);
            std::ofstream side(out_dir / (stem.str() + ".truth"), std::ios::binary);
            if (!side) throw Error(ErrorKind::IoError, "cannot write truth sidecar in " + out_dir.string());
            side << truth_to_text(truth);
            manifest.rows.push_back({stem.str() + ".ppm", e});
        }
    }
    write_manifest(out_dir / "manifest.csv", manifest);
    return manifest;
}

}  // namespace moodpipe
