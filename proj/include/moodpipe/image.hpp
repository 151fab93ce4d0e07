#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "moodpipe/error.hpp"

namespace moodpipe {

/// Inclusive pixel rectangle [x1, x2] x [y1, y2].
struct Rect {
    int x1 = 0;
    int y1 = 0;
    int x2 = 0;
    int y2 = 0;

    int width() const { return x2 - x1 + 1; }
    int height() const { return y2 - y1 + 1; }
    bool valid() const { return x1 <= x2 && y1 <= y2; }
    bool contains(int x, int y) const { return x >= x1 && x <= x2 && y >= y1 && y <= y2; }
    bool contains(double x, double y) const { return x >= x1 && x <= x2 && y >= y1 && y <= y2; }
    long long area() const { return valid() ? static_cast<long long>(width()) * height() : 0; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

inline Rect intersect(const Rect& a, const Rect& b) {
    return Rect{std::max(a.x1, b.x1), std::max(a.y1, b.y1), std::min(a.x2, b.x2),
                std::min(a.y2, b.y2)};
}

inline double iou(const Rect& a, const Rect& b) {
    const Rect i = intersect(a, b);
    const long long inter = i.area();
    const long long uni = a.area() + b.area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

struct Point2d {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2d&, const Point2d&) = default;
};

struct Circle {
    int cx = 0;
    int cy = 0;
    int r = 1;
    double score = 0.0;  // accumulator votes
    friend bool operator==(const Circle&, const Circle&) = default;
};

struct Region {
    int label = 0;
    long long area = 0;
    Point2d centroid;
    Rect bbox;
};

/// Single-channel pixel grid, row-major. `Plane<std::uint8_t>` holds
/// intensities, `Plane<double>` holds edge maps and filter responses.
template <typename T>
class Plane {
public:
    using value_type = T;

    Plane() = default;
    Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw Error(ErrorKind::InvalidDimensions, "plane dimensions must be >= 1");
        }
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    Rect bounds() const { return Rect{0, 0, width_ - 1, height_ - 1}; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    T& operator()(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const T& operator()(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    /// Edge-replicated access.
    const T& clamped(int x, int y) const {
        return (*this)(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    friend bool operator==(const Plane&, const Plane&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using GrayImage = Plane<std::uint8_t>;
using EdgeMap = Plane<double>;

/// Boolean mask, stored one byte per pixel (0 / 1).
class BinaryMask : public Plane<std::uint8_t> {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false)
        : Plane<std::uint8_t>(width, height, fill ? 1 : 0) {}

    bool test(int x, int y) const { return (*this)(x, y) != 0; }
    void set(int x, int y, bool v = true) { (*this)(x, y) = v ? 1 : 0; }

    long long count() const {
        return std::count_if(data().begin(), data().end(), [](std::uint8_t v) { return v != 0; });
    }
    bool none() const { return count() == 0; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Interleaved 8-bit raster with 1 or 3 channels.
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width), height_(height), channels_(channels) {
        if (width < 1 || height < 1) {
            throw Error(ErrorKind::InvalidDimensions, "image dimensions must be >= 1");
        }
        if (channels != 1 && channels != 3) {
            throw Error(ErrorKind::InvalidChannelCount, "channels must be 1 or 3");
        }
        data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
    }
    RasterImage(int width, int height, Rgb fill) : RasterImage(width, height, 3) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) set_rgb(x, y, fill);
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    std::uint8_t& at(int x, int y, int c) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    Rgb rgb(int x, int y) const {
        if (channels_ == 1) {
            const auto v = at(x, y, 0);
            return {v, v, v};
        }
        return {at(x, y, 0), at(x, y, 1), at(x, y, 2)};
    }
    void set_rgb(int x, int y, Rgb c) {
        at(x, y, 0) = c.r;
        at(x, y, 1) = c.g;
        at(x, y, 2) = c.b;
    }

    std::vector<std::uint8_t>& data() { return data_; }
    const std::vector<std::uint8_t>& data() const { return data_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

inline RasterImage to_raster(const GrayImage& g) {
    RasterImage out(g.width(), g.height(), 1);
    std::copy(g.data().begin(), g.data().end(), out.data().begin());
    return out;
}

inline GrayImage mask_to_gray(const BinaryMask& m) {
    GrayImage out(m.width(), m.height());
    for (std::size_t i = 0; i < m.data().size(); ++i) out.data()[i] = m.data()[i] ? 255 : 0;
    return out;
}

template <typename T>
Plane<T> crop(const Plane<T>& img, const Rect& r) {
    if (!r.valid() || r.x1 < 0 || r.y1 < 0 || r.x2 >= img.width() || r.y2 >= img.height()) {
        throw Error(ErrorKind::InvalidRect, "crop rect outside image");
    }
    Plane<T> out(r.width(), r.height());
    for (int y = 0; y < r.height(); ++y) {
        for (int x = 0; x < r.width(); ++x) out(x, y) = img(r.x1 + x, r.y1 + y);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Portable anymap I/O (binary P5 / P6, maxval 255).

namespace detail {

inline std::string next_pnm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

}  // namespace detail

inline RasterImage read_pnm(std::istream& in) {
    const std::string magic = detail::next_pnm_token(in);
    int channels = 0;
    if (magic == "P6") {
        channels = 3;
    } else if (magic == "P5") {
        channels = 1;
    } else {
        throw Error(ErrorKind::FormatError, "unsupported image magic '" + magic + "'");
    }
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(detail::next_pnm_token(in));
        h = std::stoi(detail::next_pnm_token(in));
        maxval = std::stoi(detail::next_pnm_token(in));
    } catch (const std::exception&) {
        throw Error(ErrorKind::FormatError, "malformed image header");
    }
    if (maxval != 255 || w < 1 || h < 1) {
        throw Error(ErrorKind::FormatError, "only 8-bit images with positive size are supported");
    }
    RasterImage img(w, h, channels);
    in.read(reinterpret_cast<char*>(img.data().data()),
            static_cast<std::streamsize>(img.data().size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data().size())) {
        throw Error(ErrorKind::FormatError, "truncated pixel data");
    }
    return img;
}

inline void write_pnm(std::ostream& out, const RasterImage& img) {
    out << (img.channels() == 3 ? "P6" : "P5") << '\n'
        << img.width() << ' ' << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data().data()),
              static_cast<std::streamsize>(img.data().size()));
}

inline RasterImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    return read_pnm(in);
}

inline void save_image(const std::filesystem::path& path, const RasterImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    write_pnm(out, img);
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

inline void save_image(const std::filesystem::path& path, const GrayImage& img) {
    save_image(path, to_raster(img));
}

}  // namespace moodpipe
