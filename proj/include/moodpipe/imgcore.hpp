#pragma once

// Pixel-level primitives shared by the detection and feature stages.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "moodpipe/error.hpp"
#include "moodpipe/image.hpp"

namespace moodpipe {

// ---------------------------------------------------------------------------
// Color and intensity

/// BT.601 luma, rounded and clamped to [0, 255].
inline std::uint8_t luma(Rgb p) {
    const double v = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

inline GrayImage to_grayscale(const RasterImage& img) {
    if (img.channels() != 3) {
        throw Error(ErrorKind::InvalidChannelCount, "to_grayscale expects a 3-channel image");
    }
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) out(x, y) = luma(img.rgb(x, y));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Filters

/// Square-window median with edge replication. `window` must be odd and >= 3.
template <typename T>
Plane<T> median_filter(const Plane<T>& img, int window) {
    if (window < 3 || window % 2 == 0) {
        throw Error(ErrorKind::InvalidWindow, "median window must be odd and >= 3");
    }
    const int half = window / 2;
    Plane<T> out(img.width(), img.height());
    std::vector<T> buf(static_cast<std::size_t>(window) * window);
    const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            std::size_t k = 0;
            for (int dy = -half; dy <= half; ++dy) {
                for (int dx = -half; dx <= half; ++dx) buf[k++] = img.clamped(x + dx, y + dy);
            }
            std::nth_element(buf.begin(), mid, buf.end());
            out(x, y) = *mid;
        }
    }
    return out;
}

/// 1-D median with edge replication.
inline std::vector<double> median_filter_1d(std::span<const double> v, int window) {
    if (window < 3 || window % 2 == 0) {
        throw Error(ErrorKind::InvalidWindow, "median window must be odd and >= 3");
    }
    const int n = static_cast<int>(v.size());
    const int half = window / 2;
    std::vector<double> out(v.size());
    std::vector<double> buf(static_cast<std::size_t>(window));
    const auto mid = buf.begin() + half;
    for (int i = 0; i < n; ++i) {
        for (int k = -half; k <= half; ++k) buf[k + half] = v[std::clamp(i + k, 0, n - 1)];
        std::nth_element(buf.begin(), mid, buf.end());
        out[i] = *mid;
    }
    return out;
}

/// Sampled Gaussian truncated at +-ceil(3 sigma), normalized to sum 1.
/// Index `radius` is the center tap.
inline std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidSigma, "sigma must be positive");
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i) k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    const double sum = std::accumulate(k.begin(), k.end(), 0.0);
    for (double& w : k) w /= sum;
    return k;
}

inline std::vector<double> gaussian_smooth_1d(std::span<const double> v, double sigma) {
    const auto k = gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const int n = static_cast<int>(v.size());
    std::vector<double> out(v.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = -radius; j <= radius; ++j) acc += k[j + radius] * v[std::clamp(i + j, 0, n - 1)];
        out[i] = acc;
    }
    return out;
}

/// Separable Gaussian blur with edge replication.
template <typename T>
EdgeMap gaussian_blur(const Plane<T>& img, double sigma) {
    const auto k = gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const int w = img.width();
    const int h = img.height();
    EdgeMap tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int j = -radius; j <= radius; ++j) acc += k[j + radius] * img.clamped(x + j, y);
            tmp(x, y) = acc;
        }
    }
    EdgeMap out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int j = -radius; j <= radius; ++j) acc += k[j + radius] * tmp.clamped(x, y + j);
            out(x, y) = acc;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Edge operators

enum class SobelOrientation {
    Horizontal,  // horizontal edges: |d/dy|
    Vertical,    // vertical edges: |d/dx|
    Magnitude,   // sqrt(gx^2 + gy^2)
};

/// 3x3 Sobel response. Border pixels are zero.
template <typename T>
EdgeMap sobel_edges(const Plane<T>& img, SobelOrientation orientation) {
    EdgeMap out(img.width(), img.height(), 0.0);
    for (int y = 1; y + 1 < img.height(); ++y) {
        for (int x = 1; x + 1 < img.width(); ++x) {
            const auto p = [&](int dx, int dy) { return static_cast<double>(img(x + dx, y + dy)); };
            const double gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            const double gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            switch (orientation) {
                case SobelOrientation::Horizontal: out(x, y) = std::abs(gy); break;
                case SobelOrientation::Vertical: out(x, y) = std::abs(gx); break;
                case SobelOrientation::Magnitude: out(x, y) = std::sqrt(gx * gx + gy * gy); break;
            }
        }
    }
    return out;
}

/// Gaussian smoothing followed by the 4-neighbour Laplacian (edge replication).
template <typename T>
EdgeMap laplacian_of_gaussian(const Plane<T>& img, double sigma) {
    const EdgeMap g = gaussian_blur(img, sigma);
    EdgeMap out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            out(x, y) = g.clamped(x - 1, y) + g.clamped(x + 1, y) + g.clamped(x, y - 1) +
                        g.clamped(x, y + 1) - 4.0 * g(x, y);
        }
    }
    return out;
}

/// Zero crossings of the LoG response with no magnitude gate. A pixel is
/// marked when it is positive and a 4-neighbour is negative, so the marks
/// form an 8-connected ring on the positive side of each crossing. Values
/// within rounding noise of zero count as zero.
template <typename T>
BinaryMask log_zero_contours(const Plane<T>& img, double sigma) {
    const EdgeMap lap = laplacian_of_gaussian(img, sigma);
    double peak = 0.0;
    for (double v : lap.data()) peak = std::max(peak, std::abs(v));
    const double eps = 1e-9 * std::max(peak, 1.0);
    BinaryMask out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (lap(x, y) <= eps) continue;
            constexpr std::array<std::pair<int, int>, 4> nb{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
            for (auto [dx, dy] : nb) {
                if (lap.in_bounds(x + dx, y + dy) && lap(x + dx, y + dy) < -eps) {
                    out.set(x, y);
                    break;
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Thresholding

/// Otsu's threshold over arbitrary non-negative samples, using a 256-bin
/// histogram on [min, max]. Samples strictly greater than the returned
/// value form the foreground class.
inline double otsu_threshold(std::span<const double> samples) {
    if (samples.empty()) return 0.0;
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi <= lo) return lo;
    constexpr int bins = 256;
    const double width = (hi - lo) / bins;
    std::array<double, bins> hist{};
    for (double s : samples) {
        const int b = std::min(bins - 1, static_cast<int>((s - lo) / width));
        hist[b] += 1.0;
    }
    const double total = static_cast<double>(samples.size());
    double sum_all = 0.0;
    for (int b = 0; b < bins; ++b) sum_all += b * hist[b];
    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int best_bin = 0;
    for (int b = 0; b < bins - 1; ++b) {
        w0 += hist[b];
        sum0 += b * hist[b];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double m0 = sum0 / w0;
        const double m1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            best_bin = b;
        }
    }
    return lo + (best_bin + 1) * width;
}

// ---------------------------------------------------------------------------
// Morphology

enum class MorphOp { Dilate, Erode, Open, Close };

/// Offsets (dx, dy) with (dx/a)^2 + (dy/b)^2 <= 1.
inline std::vector<std::pair<int, int>> elliptic_element(int a, int b) {
    if (a < 1 || b < 1) throw Error(ErrorKind::InvalidParams, "structuring element axes must be >= 1");
    std::vector<std::pair<int, int>> se;
    for (int dy = -b; dy <= b; ++dy) {
        for (int dx = -a; dx <= a; ++dx) {
            const double u = static_cast<double>(dx) / a;
            const double v = static_cast<double>(dy) / b;
            if (u * u + v * v <= 1.0 + 1e-12) se.emplace_back(dx, dy);
        }
    }
    return se;
}

namespace detail {

inline BinaryMask dilate(const BinaryMask& m, const std::vector<std::pair<int, int>>& se) {
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.test(x, y)) continue;
            for (auto [dx, dy] : se) {
                if (out.in_bounds(x + dx, y + dy)) out.set(x + dx, y + dy);
            }
        }
    }
    return out;
}

// Out-of-image neighbours do not veto erosion, which keeps closing
// extensive up to the image border.
inline BinaryMask erode(const BinaryMask& m, const std::vector<std::pair<int, int>>& se) {
    BinaryMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            bool keep = true;
            for (auto [dx, dy] : se) {
                if (m.in_bounds(x + dx, y + dy) && !m.test(x + dx, y + dy)) {
                    keep = false;
                    break;
                }
            }
            out.set(x, y, keep);
        }
    }
    return out;
}

}  // namespace detail

inline BinaryMask morph(const BinaryMask& mask, MorphOp op, int a, int b) {
    const auto se = elliptic_element(a, b);
    switch (op) {
        case MorphOp::Dilate: return detail::dilate(mask, se);
        case MorphOp::Erode: return detail::erode(mask, se);
        case MorphOp::Open: return detail::dilate(detail::erode(mask, se), se);
        case MorphOp::Close: return detail::erode(detail::dilate(mask, se), se);
    }
    return mask;
}

/// Flood the background 4-connectedly from every border pixel; everything
/// the flood does not reach (contours and their interiors) is returned.
inline BinaryMask fill_contours(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask reached(w, h);
    std::vector<std::pair<int, int>> stack;
    const auto seed = [&](int x, int y) {
        if (!mask.test(x, y) && !reached.test(x, y)) {
            reached.set(x, y);
            stack.emplace_back(x, y);
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        if (x > 0) seed(x - 1, y);
        if (x + 1 < w) seed(x + 1, y);
        if (y > 0) seed(x, y - 1);
        if (y + 1 < h) seed(x, y + 1);
    }
    BinaryMask out(w, h);
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = reached.data()[i] ? 0 : 1;
    return out;
}

// ---------------------------------------------------------------------------
// Connected components

struct Labeling {
    Plane<int> labels;            // 0 = background, otherwise Region::label
    std::vector<Region> regions;  // sorted by area descending
};

inline Labeling label_components(const BinaryMask& mask, int connectivity = 8) {
    if (connectivity != 4 && connectivity != 8) {
        throw Error(ErrorKind::InvalidParams, "connectivity must be 4 or 8");
    }
    const int w = mask.width();
    const int h = mask.height();
    Labeling result{Plane<int>(w, h, 0), {}};
    std::vector<std::pair<int, int>> stack;
    int next = 0;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (!mask.test(sx, sy) || result.labels(sx, sy) != 0) continue;
            Region reg;
            reg.label = ++next;
            reg.bbox = Rect{sx, sy, sx, sy};
            double sum_x = 0.0, sum_y = 0.0;
            result.labels(sx, sy) = reg.label;
            stack.emplace_back(sx, sy);
            while (!stack.empty()) {
                const auto [x, y] = stack.back();
                stack.pop_back();
                ++reg.area;
                sum_x += x;
                sum_y += y;
                reg.bbox.x1 = std::min(reg.bbox.x1, x);
                reg.bbox.x2 = std::max(reg.bbox.x2, x);
                reg.bbox.y1 = std::min(reg.bbox.y1, y);
                reg.bbox.y2 = std::max(reg.bbox.y2, y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if ((dx == 0 && dy == 0) || (connectivity == 4 && dx != 0 && dy != 0)) continue;
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (mask.in_bounds(nx, ny) && mask.test(nx, ny) && result.labels(nx, ny) == 0) {
                            result.labels(nx, ny) = reg.label;
                            stack.emplace_back(nx, ny);
                        }
                    }
                }
            }
            reg.centroid = {sum_x / static_cast<double>(reg.area), sum_y / static_cast<double>(reg.area)};
            result.regions.push_back(reg);
        }
    }
    std::stable_sort(result.regions.begin(), result.regions.end(),
                     [](const Region& a, const Region& b) { return a.area > b.area; });
    return result;
}

inline std::vector<Region> connected_components(const BinaryMask& mask, int connectivity = 8) {
    return label_components(mask, connectivity).regions;
}

inline BinaryMask region_mask(const Labeling& lab, int label) {
    BinaryMask out(lab.labels.width(), lab.labels.height());
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = lab.labels.data()[i] == label;
    return out;
}

/// Area and centroid of the set pixels of a mask.
inline Region mask_region(const BinaryMask& m) {
    Region r;
    double sx = 0.0, sy = 0.0;
    r.bbox = Rect{m.width(), m.height(), -1, -1};
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.test(x, y)) continue;
            ++r.area;
            sx += x;
            sy += y;
            r.bbox.x1 = std::min(r.bbox.x1, x);
            r.bbox.x2 = std::max(r.bbox.x2, x);
            r.bbox.y1 = std::min(r.bbox.y1, y);
            r.bbox.y2 = std::max(r.bbox.y2, y);
        }
    }
    if (r.area > 0) r.centroid = {sx / static_cast<double>(r.area), sy / static_cast<double>(r.area)};
    return r;
}

// ---------------------------------------------------------------------------
// Integral projections

template <typename T>
using projection_sum_t = std::conditional_t<std::is_integral_v<T>, std::int64_t, double>;

template <typename T>
struct Projections {
    std::vector<projection_sum_t<T>> vertical;    // V(x), x in [x1, x2]
    std::vector<projection_sum_t<T>> horizontal;  // H(y), y in [y1, y2]
};

template <typename T>
Projections<T> integral_projections(const Plane<T>& edge, const Rect& rect) {
    if (!rect.valid() || rect.x1 < 0 || rect.y1 < 0 || rect.x2 >= edge.width() ||
        rect.y2 >= edge.height()) {
        throw Error(ErrorKind::InvalidRect, "projection rect outside image");
    }
    using S = projection_sum_t<T>;
    Projections<T> p{std::vector<S>(rect.width(), S{}), std::vector<S>(rect.height(), S{})};
    for (int y = rect.y1; y <= rect.y2; ++y) {
        for (int x = rect.x1; x <= rect.x2; ++x) {
            const S v = static_cast<S>(edge(x, y));
            p.vertical[x - rect.x1] += v;
            p.horizontal[y - rect.y1] += v;
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Hough circle transform

/// Integer offsets of a midpoint-rasterized circle of radius r; each
/// pixel appears once.
inline std::vector<std::pair<int, int>> circle_offsets(int r) {
    std::vector<std::pair<int, int>> pts;
    if (r <= 0) return {{0, 0}};
    int x = r, y = 0, err = 1 - r;
    while (x >= y) {
        const std::array<std::pair<int, int>, 8> sym{{{x, y}, {y, x}, {-y, x}, {-x, y},
                                                      {-x, -y}, {-y, -x}, {y, -x}, {x, -y}}};
        pts.insert(pts.end(), sym.begin(), sym.end());
        ++y;
        if (err < 0) {
            err += 2 * y + 1;
        } else {
            --x;
            err += 2 * (y - x) + 1;
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

/// Votes a perfectly matching outline collects at radius r.
inline double ideal_perimeter_votes(int r) { return static_cast<double>(circle_offsets(r).size()); }

struct HoughParams {
    int r_min = 10;
    int r_max = 60;
    double edge_threshold = 0.0;
    double vote_fraction = 0.5;
};

/// Circles in (cx, cy, r) accumulator space at one-pixel resolution.
/// Candidates need votes >= vote_fraction * ideal_perimeter_votes(r) and are
/// ranked by that normalized fit (raw votes break ties), then greedily
/// suppressed within r/2 of a stronger circle's center.
template <typename T>
std::vector<Circle> hough_circles(const Plane<T>& edge, const HoughParams& hp) {
    if (hp.r_min <= 0 || hp.r_min > hp.r_max) {
        throw Error(ErrorKind::InvalidRadiusRange, "need 0 < r_min <= r_max");
    }
    const int w = edge.width();
    const int h = edge.height();
    const int nr = hp.r_max - hp.r_min + 1;
    std::vector<std::vector<std::pair<int, int>>> offsets(nr);
    for (int i = 0; i < nr; ++i) offsets[i] = circle_offsets(hp.r_min + i);

    const std::size_t plane = static_cast<std::size_t>(w) * h;
    // votes at one (center, r) never exceed the offset count, far below 2^16
    std::vector<std::uint16_t> acc(plane * nr, 0);
    bool any = false;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!(static_cast<double>(edge(x, y)) > hp.edge_threshold)) continue;
            any = true;
            for (int i = 0; i < nr; ++i) {
                std::uint16_t* layer = acc.data() + plane * i;
                for (auto [dx, dy] : offsets[i]) {
                    const int cx = x - dx;
                    const int cy = y - dy;
                    if (cx >= 0 && cy >= 0 && cx < w && cy < h) ++layer[static_cast<std::size_t>(cy) * w + cx];
                }
            }
        }
    }
    if (!any) return {};

    struct Candidate {
        Circle c;
        double fit;
    };
    std::vector<Candidate> cands;
    for (int i = 0; i < nr; ++i) {
        const double perim = static_cast<double>(offsets[i].size());
        const double need = std::max(1.0, hp.vote_fraction * perim);
        const std::uint16_t* layer = acc.data() + plane * i;
        for (int cy = 0; cy < h; ++cy) {
            for (int cx = 0; cx < w; ++cx) {
                const double votes = layer[static_cast<std::size_t>(cy) * w + cx];
                if (votes >= need) cands.push_back({Circle{cx, cy, hp.r_min + i, votes}, votes / perim});
            }
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.fit != b.fit) return a.fit > b.fit;
        return a.c.score > b.c.score;
    });
    std::vector<Circle> kept;
    for (const auto& cand : cands) {
        bool suppressed = false;
        for (const auto& k : kept) {
            const double dx = cand.c.cx - k.cx;
            const double dy = cand.c.cy - k.cy;
            if (std::sqrt(dx * dx + dy * dy) < 0.5 * k.r) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(cand.c);
    }
    return kept;
}

// ---------------------------------------------------------------------------
// Geometry helpers and drawing

namespace detail {

/// Box-filter resampling of one line: each output sample is the mean of the
/// piecewise-constant input over its footprint.
inline void resample_line(const double* src, int n, int src_stride, double* dst, int m, int dst_stride) {
    const double scale = static_cast<double>(n) / m;
    for (int i = 0; i < m; ++i) {
        const double a = i * scale;
        const double b = (i + 1) * scale;
        double acc = 0.0;
        for (int k = static_cast<int>(a); k < n && k < b; ++k) {
            const double lo = std::max(a, static_cast<double>(k));
            const double hi = std::min(b, static_cast<double>(k + 1));
            if (hi > lo) acc += (hi - lo) * src[k * src_stride];
        }
        dst[i * dst_stride] = acc / scale;
    }
}

}  // namespace detail

/// Area-averaging resize to out_w x out_h.
inline GrayImage resample_area(const GrayImage& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) throw Error(ErrorKind::InvalidDimensions, "resample target must be >= 1x1");
    const int w = img.width();
    const int h = img.height();
    std::vector<double> src(img.data().begin(), img.data().end());
    std::vector<double> tmp(static_cast<std::size_t>(out_w) * h);
    for (int y = 0; y < h; ++y) detail::resample_line(&src[static_cast<std::size_t>(y) * w], w, 1, &tmp[static_cast<std::size_t>(y) * out_w], out_w, 1);
    std::vector<double> res(static_cast<std::size_t>(out_w) * out_h);
    for (int x = 0; x < out_w; ++x) detail::resample_line(&tmp[x], h, out_w, &res[x], out_h, out_w);
    GrayImage out(out_w, out_h);
    for (std::size_t i = 0; i < res.size(); ++i) {
        out.data()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(res[i]), 0L, 255L));
    }
    return out;
}

inline GrayImage upscale_nearest(const GrayImage& img, int factor) {
    GrayImage out(img.width() * factor, img.height() * factor);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) out(x, y) = img(x / factor, y / factor);
    }
    return out;
}

inline RasterImage upscale_nearest(const RasterImage& img, int factor) {
    RasterImage out(img.width() * factor, img.height() * factor, img.channels());
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(x / factor, y / factor, c);
        }
    }
    return out;
}

template <typename T>
Plane<T> mirror_horizontal(const Plane<T>& img) {
    Plane<T> out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) out(x, y) = img(img.width() - 1 - x, y);
    }
    return out;
}

inline RasterImage mirror_horizontal(const RasterImage& img) {
    RasterImage out(img.width(), img.height(), img.channels());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(img.width() - 1 - x, y, c);
        }
    }
    return out;
}

inline void draw_circle(RasterImage& img, const Circle& c, Rgb color) {
    for (auto [dx, dy] : circle_offsets(c.r)) {
        if (img.in_bounds(c.cx + dx, c.cy + dy)) img.set_rgb(c.cx + dx, c.cy + dy, color);
    }
}

inline void draw_rect(RasterImage& img, const Rect& r, Rgb color) {
    for (int x = r.x1; x <= r.x2; ++x) {
        if (img.in_bounds(x, r.y1)) img.set_rgb(x, r.y1, color);
        if (img.in_bounds(x, r.y2)) img.set_rgb(x, r.y2, color);
    }
    for (int y = r.y1; y <= r.y2; ++y) {
        if (img.in_bounds(r.x1, y)) img.set_rgb(r.x1, y, color);
        if (img.in_bounds(r.x2, y)) img.set_rgb(r.x2, y, color);
    }
}

}  // namespace moodpipe
