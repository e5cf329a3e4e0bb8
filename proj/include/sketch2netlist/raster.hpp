#pragma once

#include <cstdint>
#include <vector>

#include "sketch2netlist/errors.hpp"
#include "sketch2netlist/geometry.hpp"

namespace s2n {

/// 8-bit grayscale raster, row-major, 0 = black ink, 255 = white paper.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 255)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { pixels[static_cast<std::size_t>(y) * width + x] = v; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// Boolean raster with true = foreground ink. Stored as bytes, not
/// vector<bool>, so rows can be scanned without bit twiddling.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    std::size_t count() const {
        std::size_t n = 0;
        for (std::uint8_t b : bits) n += b;
        return n;
    }
};

inline bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.width == b.width && a.height == b.height && a.bits == b.bits;
}

struct AdaptiveThresholdParams {
    int window = 21;     // odd, >= 3
    double c = 10.0;     // offset subtracted from the local weighted mean
    double sigma = 3.5;  // Gaussian spread in pixels

    static double default_sigma(int window) {
        return 0.3 * ((window - 1) * 0.5 - 1.0) + 0.8;
    }
};

struct ComponentRegion {
    std::size_t pixel_count = 0;
    Point centroid;
    BoundingBox bbox;  // half-open in pixel coordinates: [min, max+1)
};

/// Ink is dark: bit(x,y) = pixels(x,y) < t. Equality goes to background.
inline BinaryMask global_threshold(const GrayImage& img, int t) {
    BinaryMask out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) out.bits[i] = img.pixels[i] < t ? 1 : 0;
    return out;
}

/// bit(x,y) = pixels(x,y) < gaussian_mean(w x w neighborhood) - C, with
/// normalized weights and edge replication at the borders. Implemented as a
/// separable convolution over a replicate-padded copy, which is identical to
/// the direct 2-D convolution up to floating-point summation order.
inline BinaryMask adaptive_threshold(const GrayImage& img, const AdaptiveThresholdParams& p) {
    const int w = p.window;
    const int r = w / 2;
    const double sigma = p.sigma > 0.0 ? p.sigma : AdaptiveThresholdParams::default_sigma(w);

    std::vector<double> kernel(w);
    double sum = 0.0;
    for (int i = 0; i < w; ++i) {
        const double d = i - r;
        kernel[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += kernel[i];
    }
    for (double& k : kernel) k /= sum;

    const int pw = img.width + 2 * r;
    const int ph = img.height + 2 * r;
    std::vector<double> padded(static_cast<std::size_t>(pw) * ph);
    for (int y = 0; y < ph; ++y) {
        const int sy = std::clamp(y - r, 0, img.height - 1);
        for (int x = 0; x < pw; ++x) {
            const int sx = std::clamp(x - r, 0, img.width - 1);
            padded[static_cast<std::size_t>(y) * pw + x] = img.at(sx, sy);
        }
    }

    // Horizontal pass: valid in x, full padded height.
    std::vector<double> horz(static_cast<std::size_t>(img.width) * ph);
    for (int y = 0; y < ph; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = 0; i < w; ++i) acc += kernel[i] * padded[static_cast<std::size_t>(y) * pw + x + i];
            horz[static_cast<std::size_t>(y) * img.width + x] = acc;
        }
    }

    BinaryMask out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = 0; i < w; ++i) acc += kernel[i] * horz[static_cast<std::size_t>(y + i) * img.width + x];
            out.set(x, y, img.at(x, y) < acc - p.c);
        }
    }
    return out;
}

/// Dilation by a square structuring element of side 2*radius+1, done as two
/// 1-D passes (the square element is separable).
inline BinaryMask dilate(const BinaryMask& mask, int radius) {
    if (radius <= 0) return mask;
    BinaryMask horz(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool v = false;
            for (int dx = -radius; dx <= radius && !v; ++dx) {
                const int sx = x + dx;
                if (sx >= 0 && sx < mask.width && mask.at(sx, y)) v = true;
            }
            horz.set(x, y, v);
        }
    }
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool v = false;
            for (int dy = -radius; dy <= radius && !v; ++dy) {
                const int sy = y + dy;
                if (sy >= 0 && sy < mask.height && horz.at(x, sy)) v = true;
            }
            out.set(x, y, v);
        }
    }
    return out;
}

/// 8-connected labeling. Regions are returned ordered by (min_y, min_x) of
/// the region; centroids are arithmetic means of member pixel coordinates.
inline std::vector<ComponentRegion> connected_components(const BinaryMask& mask) {
    std::vector<std::int32_t> label(mask.bits.size(), -1);
    std::vector<ComponentRegion> regions;
    std::vector<std::pair<int, int>> stack;

    for (int sy = 0; sy < mask.height; ++sy) {
        for (int sx = 0; sx < mask.width; ++sx) {
            const std::size_t si = static_cast<std::size_t>(sy) * mask.width + sx;
            if (!mask.bits[si] || label[si] >= 0) continue;
            const std::int32_t id = static_cast<std::int32_t>(regions.size());
            label[si] = id;
            stack.push_back({sx, sy});
            std::size_t n = 0;
            double cx = 0.0, cy = 0.0;
            int min_x = sx, max_x = sx, min_y = sy, max_y = sy;
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                ++n;
                cx += x;
                cy += y;
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || nx >= mask.width || ny < 0 || ny >= mask.height) continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * mask.width + nx;
                        if (mask.bits[ni] && label[ni] < 0) {
                            label[ni] = id;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
            ComponentRegion region;
            region.pixel_count = n;
            region.centroid = Point{cx / n, cy / n};
            region.bbox = BoundingBox{static_cast<double>(min_x), static_cast<double>(min_y),
                                      static_cast<double>(max_x + 1), static_cast<double>(max_y + 1)};
            regions.push_back(region);
        }
    }
    std::sort(regions.begin(), regions.end(), [](const ComponentRegion& a, const ComponentRegion& b) {
        if (a.bbox.y_min != b.bbox.y_min) return a.bbox.y_min < b.bbox.y_min;
        return a.bbox.x_min < b.bbox.x_min;
    });
    return regions;
}

inline BinaryMask intersect_masks(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw Error(ErrorKind::DimensionMismatch, "mask dimensions differ");
    BinaryMask out(a.width, a.height);
    for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = a.bits[i] & b.bits[i];
    return out;
}

/// Whites out every pixel inside any box. A pixel (x, y) is inside when
/// x_min <= x < x_max and y_min <= y < y_max; boxes are clamped to the image.
inline GrayImage erase_regions(const GrayImage& img, const std::vector<BoundingBox>& boxes) {
    GrayImage out = img;
    for (const BoundingBox& box : boxes) {
        const int x0 = std::max(0, static_cast<int>(std::ceil(box.x_min)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(box.y_min)));
        const int x1 = std::min(img.width, static_cast<int>(std::ceil(box.x_max)));
        const int y1 = std::min(img.height, static_cast<int>(std::ceil(box.y_max)));
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) out.set(x, y, 255);
    }
    return out;
}

/// Rasterizes box outlines: a pixel is set iff it lies within stroke/2
/// (Chebyshev) of some box's edge.
inline BinaryMask render_box_perimeters(const std::vector<BoundingBox>& boxes, int width, int height,
                                        double stroke) {
    BinaryMask out(width, height);
    const double half = stroke / 2.0;
    for (const BoundingBox& box : boxes) {
        const int x0 = std::max(0, static_cast<int>(std::floor(box.x_min - half)));
        const int y0 = std::max(0, static_cast<int>(std::floor(box.y_min - half)));
        const int x1 = std::min(width - 1, static_cast<int>(std::ceil(box.x_max + half)));
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(box.y_max + half)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (chebyshev_to_box_perimeter(Point{static_cast<double>(x), static_cast<double>(y)},
                                               box) <= half)
                    out.set(x, y, true);
            }
        }
    }
    return out;
}

}  // namespace s2n
