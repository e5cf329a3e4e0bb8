#include <catch2/catch_amalgamated.hpp>

#include "sketch2netlist/clustering.hpp"
#include "sketch2netlist/raster.hpp"

using namespace s2n;

namespace {

// Independent oracle: direct 2-D Gaussian convolution with edge replication.
double gaussian_mean_2d(const GrayImage& img, int x, int y, int w, double sigma) {
    const int r = w / 2;
    double sum = 0.0, wsum = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            const int sx = std::clamp(x + dx, 0, img.width - 1);
            const int sy = std::clamp(y + dy, 0, img.height - 1);
            sum += g * img.at(sx, sy);
            wsum += g;
        }
    }
    return sum / wsum;
}

}  // namespace

TEST_CASE("global threshold: strict less-than, ink is dark") {
    GrayImage img(2, 2);
    img.set(0, 0, 0);
    img.set(1, 0, 255);
    img.set(0, 1, 127);
    img.set(1, 1, 128);
    const BinaryMask mask = global_threshold(img, 127);
    CHECK(mask.at(0, 0));
    CHECK_FALSE(mask.at(1, 0));
    CHECK_FALSE(mask.at(0, 1));  // equal to threshold -> background
    CHECK_FALSE(mask.at(1, 1));

    const GrayImage zeros(4, 4, 0);
    CHECK(global_threshold(zeros, 127).count() == 16);
}

TEST_CASE("global threshold is monotone in t") {
    SplitMix64 rng(19);
    GrayImage img(16, 16);
    for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng.next_below(256));
    BinaryMask prev = global_threshold(img, 0);
    for (int t = 1; t <= 255; t += 17) {
        const BinaryMask cur = global_threshold(img, t);
        for (std::size_t i = 0; i < cur.bits.size(); ++i)
            if (prev.bits[i]) CHECK(cur.bits[i]);
        prev = cur;
    }
}

TEST_CASE("adaptive threshold on constant images") {
    const GrayImage img(32, 32, 100);
    AdaptiveThresholdParams p;
    p.c = 5.0;
    CHECK(adaptive_threshold(img, p).count() == 0);
    p.c = 0.5;
    CHECK(adaptive_threshold(img, p).count() == 0);
}

TEST_CASE("adaptive threshold singles out a dark pixel in a bright field") {
    GrayImage img(31, 31, 255);
    img.set(15, 15, 0);
    AdaptiveThresholdParams p;
    p.window = 11;
    p.c = 6.0;
    p.sigma = AdaptiveThresholdParams::default_sigma(11);
    const BinaryMask mask = adaptive_threshold(img, p);
    for (int y = 0; y < 31; ++y) {
        for (int x = 0; x < 31; ++x) {
            const double mean = gaussian_mean_2d(img, x, y, p.window, p.sigma);
            const bool expected = img.at(x, y) < mean - p.c;
            INFO("pixel (" << x << ", " << y << ")");
            CHECK(mask.at(x, y) == expected);
        }
    }
    CHECK(mask.count() == 1);
    CHECK(mask.at(15, 15));
}

TEST_CASE("adaptive threshold matches the direct-convolution oracle on noise") {
    SplitMix64 rng(23);
    GrayImage img(24, 20);
    for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng.next_below(256));
    AdaptiveThresholdParams p;
    p.window = 7;
    p.c = 4.0;
    p.sigma = AdaptiveThresholdParams::default_sigma(7);
    const BinaryMask mask = adaptive_threshold(img, p);
    int checked = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double mean = gaussian_mean_2d(img, x, y, p.window, p.sigma);
            // Skip pixels sitting numerically on the decision boundary.
            if (std::abs(img.at(x, y) - (mean - p.c)) < 1e-6) continue;
            CHECK(mask.at(x, y) == (img.at(x, y) < mean - p.c));
            ++checked;
        }
    }
    CHECK(checked > 400);
}

TEST_CASE("dilation with a square element") {
    BinaryMask m(12, 12);
    m.set(5, 5, true);
    const BinaryMask d = dilate(m, 1);
    CHECK(d.count() == 9);
    for (int y = 4; y <= 6; ++y)
        for (int x = 4; x <= 6; ++x) CHECK(d.at(x, y));

    CHECK(dilate(BinaryMask(8, 8), 2).count() == 0);

    BinaryMask two(8, 8);
    two.set(0, 0, true);
    two.set(2, 0, true);
    CHECK(connected_components(dilate(two, 1)).size() == 1);
}

TEST_CASE("dilation is extensive, monotone and distributes over union") {
    SplitMix64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryMask a(20, 20), b(20, 20);
        for (int i = 0; i < 15; ++i) {
            a.set(static_cast<int>(rng.next_below(20)), static_cast<int>(rng.next_below(20)), true);
            b.set(static_cast<int>(rng.next_below(20)), static_cast<int>(rng.next_below(20)), true);
        }
        const BinaryMask da = dilate(a, 2);
        for (std::size_t i = 0; i < a.bits.size(); ++i)
            if (a.bits[i]) CHECK(da.bits[i]);  // extensive

        BinaryMask uni(20, 20);
        for (std::size_t i = 0; i < uni.bits.size(); ++i) uni.bits[i] = a.bits[i] | b.bits[i];
        const BinaryMask du = dilate(uni, 2);
        const BinaryMask db = dilate(b, 2);
        for (std::size_t i = 0; i < du.bits.size(); ++i)
            CHECK(du.bits[i] == (da.bits[i] | db.bits[i]));
    }
}

TEST_CASE("connected components on blocks and blobs") {
    BinaryMask m(16, 16);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) {
            m.set(x, y, true);
            m.set(x + 10, y + 10, true);
        }
    const auto regions = connected_components(m);
    REQUIRE(regions.size() == 2);
    CHECK(regions[0].centroid.x == Catch::Approx(1.0));
    CHECK(regions[0].centroid.y == Catch::Approx(1.0));
    CHECK(regions[1].centroid.x == Catch::Approx(11.0));
    CHECK(regions[1].centroid.y == Catch::Approx(11.0));
    CHECK(regions[0].pixel_count == 9);

    CHECK(connected_components(BinaryMask(8, 8)).empty());

    BinaryMask l_shape(8, 8);
    for (int y = 0; y < 5; ++y) l_shape.set(2, y, true);
    for (int x = 2; x < 7; ++x) l_shape.set(x, 4, true);
    CHECK(connected_components(l_shape).size() == 1);
}

TEST_CASE("connected components: counts invariant under translation") {
    SplitMix64 rng(31);
    BinaryMask m(24, 24);
    for (int i = 0; i < 40; ++i)
        m.set(static_cast<int>(rng.next_below(16)), static_cast<int>(rng.next_below(16)), true);
    const auto base = connected_components(m);
    std::size_t total = 0;
    for (const auto& r : base) total += r.pixel_count;
    CHECK(total == m.count());

    BinaryMask shifted(24, 24);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            if (m.at(x, y)) shifted.set(x + 5, y + 7, true);
    const auto moved = connected_components(shifted);
    REQUIRE(moved.size() == base.size());
    std::vector<std::size_t> a, b;
    for (const auto& r : base) a.push_back(r.pixel_count);
    for (const auto& r : moved) b.push_back(r.pixel_count);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
}

TEST_CASE("mask intersection") {
    BinaryMask a(8, 8), b(8, 8);
    a.set(1, 1, true);
    a.set(2, 2, true);
    b.set(2, 2, true);
    b.set(3, 3, true);
    const BinaryMask both = intersect_masks(a, b);
    CHECK(both.count() == 1);
    CHECK(both.at(2, 2));
    CHECK(intersect_masks(a, a) == a);                  // idempotent
    CHECK(intersect_masks(a, BinaryMask(8, 8)).count() == 0);
    CHECK(intersect_masks(a, b) == intersect_masks(b, a));
    CHECK_THROWS_AS(intersect_masks(a, BinaryMask(4, 4)), Error);
}

TEST_CASE("erase regions") {
    const GrayImage black(8, 8, 0);
    const GrayImage all = erase_regions(black, {{-1, -1, 9, 9}});
    for (auto px : all.pixels) CHECK(px == 255);

    const GrayImage same = erase_regions(black, {});
    CHECK(same.pixels == black.pixels);

    const GrayImage one = erase_regions(black, {{2, 2, 4, 4}});
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const bool inside = x >= 2 && x < 4 && y >= 2 && y < 4;
            CHECK(one.at(x, y) == (inside ? 255 : 0));
        }

    // Idempotent, and untouched outside the boxes.
    const GrayImage twice = erase_regions(one, {{2, 2, 4, 4}});
    CHECK(twice.pixels == one.pixels);
}

TEST_CASE("box perimeter rendering") {
    const BoundingBox box{3, 3, 12, 10};
    const BinaryMask thin = render_box_perimeters({box}, 16, 16, 1.0);
    CHECK(thin.at(3, 3));
    CHECK(thin.at(12, 10));
    CHECK(thin.at(7, 3));
    CHECK_FALSE(thin.at(7, 7));  // interior stays clear
    CHECK_FALSE(thin.at(0, 0));

    CHECK(render_box_perimeters({}, 16, 16, 3.0).count() == 0);

    // Stroke 3: verified against a brute-force distance-to-outline oracle.
    const BinaryMask thick = render_box_perimeters({box}, 16, 16, 3.0);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            double best = 1e18;
            for (double s = box.x_min; s <= box.x_max; s += 0.25) {
                best = std::min(best, std::max(std::abs(x - s), std::abs(y - box.y_min)));
                best = std::min(best, std::max(std::abs(x - s), std::abs(y - box.y_max)));
            }
            for (double s = box.y_min; s <= box.y_max; s += 0.25) {
                best = std::min(best, std::max(std::abs(x - box.x_min), std::abs(y - s)));
                best = std::min(best, std::max(std::abs(x - box.x_max), std::abs(y - s)));
            }
            INFO("pixel (" << x << ", " << y << ")");
            CHECK(thick.at(x, y) == (best <= 1.5));
        }
    }
}
