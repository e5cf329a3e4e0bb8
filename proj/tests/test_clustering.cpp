#include <catch2/catch_amalgamated.hpp>

#include "sketch2netlist/clustering.hpp"

using namespace s2n;

namespace {

// Exhaustive search over all 2-partitions; the oracle for small inputs.
double best_two_partition_inertia(const std::vector<Point>& pts) {
    const std::size_t n = pts.size();
    double best = std::numeric_limits<double>::max();
    for (std::uint32_t bitsel = 1; bitsel + 1 < (1u << n); ++bitsel) {
        Point mean[2] = {{0, 0}, {0, 0}};
        std::size_t cnt[2] = {0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            const int g = (bitsel >> i) & 1;
            mean[g].x += pts[i].x;
            mean[g].y += pts[i].y;
            ++cnt[g];
        }
        for (int g : {0, 1}) {
            mean[g].x /= cnt[g];
            mean[g].y /= cnt[g];
        }
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            inertia += detail::sq_dist(pts[i], mean[(bitsel >> i) & 1]);
        best = std::min(best, inertia);
    }
    return best;
}

}  // namespace

TEST_CASE("splitmix64 reference values and ranges") {
    SplitMix64 rng(0);
    // First outputs of SplitMix64 from seed 0, per the published algorithm.
    CHECK(rng.next() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
    CHECK(rng.next() == 0x06c45d188009454fULL);

    SplitMix64 r2(42);
    for (int i = 0; i < 1000; ++i) {
        const double d = r2.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        CHECK(r2.next_below(10) < 10);
    }
}

TEST_CASE("kmeans throws on too few points") {
    KMeansParams p;
    p.k = 3;
    CHECK_THROWS_AS(kmeans({{0, 0}, {1, 1}}, p), Error);
    CHECK_THROWS_AS(kmeans({}, p), Error);
}

TEST_CASE("kmeans k=1 returns the mean") {
    KMeansParams p;
    p.k = 1;
    const auto r = kmeans({{0, 0}, {2, 0}, {0, 2}, {2, 2}}, p);
    REQUIRE(r.centroids.size() == 1);
    CHECK(r.centroids[0].x == Catch::Approx(1.0));
    CHECK(r.centroids[0].y == Catch::Approx(1.0));
    CHECK(r.inertia == Catch::Approx(8.0));
}

TEST_CASE("kmeans splits the 0,2,10,12 line optimally") {
    const std::vector<Point> pts{{0, 0}, {2, 0}, {10, 0}, {12, 0}};
    KMeansParams p;
    p.k = 2;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        p.seed = seed;
        const auto r = kmeans(pts, p);
        CHECK(r.inertia == Catch::Approx(4.0));
        std::vector<double> xs{r.centroids[0].x, r.centroids[1].x};
        std::sort(xs.begin(), xs.end());
        CHECK(xs[0] == Catch::Approx(1.0));
        CHECK(xs[1] == Catch::Approx(11.0));
        CHECK(r.assignment[0] == r.assignment[1]);
        CHECK(r.assignment[2] == r.assignment[3]);
        CHECK(r.assignment[0] != r.assignment[2]);
    }
}

TEST_CASE("kmeans matches the exhaustive 2-partition oracle on separated pairs") {
    SplitMix64 gen(77);
    KMeansParams p;
    p.k = 2;
    for (int trial = 0; trial < 60; ++trial) {
        // Two tight groups far apart, 2-4 points each.
        std::vector<Point> pts;
        const Point c0{gen.next_double() * 20, gen.next_double() * 20};
        const Point c1{c0.x + 100 + gen.next_double() * 50, c0.y + gen.next_double() * 20};
        const int n0 = 2 + static_cast<int>(gen.next_below(3));
        const int n1 = 2 + static_cast<int>(gen.next_below(3));
        for (int i = 0; i < n0; ++i)
            pts.push_back({c0.x + gen.next_double() * 3, c0.y + gen.next_double() * 3});
        for (int i = 0; i < n1; ++i)
            pts.push_back({c1.x + gen.next_double() * 3, c1.y + gen.next_double() * 3});
        p.seed = trial;
        const auto r = kmeans(pts, p);
        const double oracle = best_two_partition_inertia(pts);
        CHECK(r.inertia == Catch::Approx(oracle).margin(1e-9));
    }
}

TEST_CASE("kmeans never leaves a cluster empty") {
    // Heavy duplication: 8 copies of one point, 1 of another, k = 3.
    std::vector<Point> pts(8, Point{5, 5});
    pts.push_back({50, 50});
    KMeansParams p;
    p.k = 3;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        p.seed = seed;
        const auto r = kmeans(pts, p);
        std::vector<int> counts(3, 0);
        for (int a : r.assignment) {
            REQUIRE(a >= 0);
            REQUIRE(a < 3);
            ++counts[a];
        }
        for (int c : counts) CHECK(c > 0);
    }
}

TEST_CASE("kmeans is deterministic for a fixed seed and input order") {
    SplitMix64 gen(123);
    std::vector<Point> pts;
    for (int i = 0; i < 40; ++i)
        pts.push_back({gen.next_double() * 200, gen.next_double() * 200});
    KMeansParams p;
    p.k = 5;
    p.seed = 9;
    const auto a = kmeans(pts, p);
    const auto b = kmeans(pts, p);
    CHECK(a.assignment == b.assignment);
    CHECK(a.inertia == b.inertia);
    for (int c = 0; c < p.k; ++c) {
        CHECK(a.centroids[c].x == b.centroids[c].x);
        CHECK(a.centroids[c].y == b.centroids[c].y);
    }
}

TEST_CASE("kmeans centroids are the means of their clusters") {
    SplitMix64 gen(321);
    std::vector<Point> pts;
    for (int i = 0; i < 30; ++i)
        pts.push_back({gen.next_double() * 100, gen.next_double() * 100});
    KMeansParams p;
    p.k = 4;
    p.seed = 2;
    const auto r = kmeans(pts, p);
    std::vector<Point> sums(p.k, Point{0, 0});
    std::vector<int> counts(p.k, 0);
    double inertia = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        sums[r.assignment[i]].x += pts[i].x;
        sums[r.assignment[i]].y += pts[i].y;
        ++counts[r.assignment[i]];
        inertia += detail::sq_dist(pts[i], r.centroids[r.assignment[i]]);
    }
    for (int c = 0; c < p.k; ++c) {
        if (counts[c] == 0) continue;
        CHECK(r.centroids[c].x == Catch::Approx(sums[c].x / counts[c]));
        CHECK(r.centroids[c].y == Catch::Approx(sums[c].y / counts[c]));
    }
    CHECK(r.inertia == Catch::Approx(inertia));
}
