#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/rng.hpp"

namespace biovoice {

// 1-D k-means result; centers ascending, assignments refer to sorted centers.
struct KmeansResult {
    std::vector<double> centers;
    std::vector<int> assignments;
    double inertia = 0.0;
};

namespace detail {

inline int nearest_center(const std::vector<double>& centers, double x) {
    int best = 0;
    double bd = std::abs(x - centers[0]);
    for (int c = 1; c < static_cast<int>(centers.size()); ++c) {
        double d = std::abs(x - centers[c]);
        if (d < bd) {
            bd = d;
            best = c;
        }
    }
    return best;
}

// One seeded Lloyd run; returns inertia.
inline double lloyd_run(const std::vector<double>& pts, int k, Rng& rng,
                        std::vector<double>& centers, std::vector<int>& assign) {
    const std::size_t n = pts.size();
    // k-means++ seeding.
    centers.clear();
    centers.push_back(pts[rng.below(n)]);
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dmin = std::abs(pts[i] - centers[0]);
            for (std::size_t c = 1; c < centers.size(); ++c)
                dmin = std::min(dmin, std::abs(pts[i] - centers[c]));
            d2[i] = dmin * dmin;
            total += d2[i];
        }
        if (total <= 0.0) {
            // All mass on existing centers; seed any point not yet a center.
            for (std::size_t i = 0; i < n; ++i) {
                bool used = false;
                for (double c : centers)
                    if (pts[i] == c) used = true;
                if (!used) {
                    centers.push_back(pts[i]);
                    break;
                }
            }
            continue;
        }
        double target = rng.uniform01() * total;
        std::size_t pick = n - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= target) {
                pick = i;
                break;
            }
        }
        centers.push_back(pts[pick]);
    }
    // Lloyd iterations to an assignment fixpoint.
    assign.assign(n, -1);
    for (;;) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int c = nearest_center(centers, pts[i]);
            if (c != assign[i]) {
                assign[i] = c;
                changed = true;
            }
        }
        std::vector<double> sum(k, 0.0);
        std::vector<std::size_t> cnt(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sum[assign[i]] += pts[i];
            ++cnt[assign[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (cnt[c] > 0) {
                centers[c] = sum[c] / static_cast<double>(cnt[c]);
            } else {
                // Empty cluster: reseed to the point farthest from its center.
                std::size_t far = 0;
                double fd = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d = std::abs(pts[i] - centers[assign[i]]);
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                centers[c] = pts[far];
                changed = true;
            }
        }
        if (!changed) break;
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = pts[i] - centers[assign[i]];
        inertia += d * d;
    }
    return inertia;
}

}  // namespace detail

// Lloyd iterations with k-means++ seeding, best of `restarts` by inertia;
// centers returned ascending. Needs at least k distinct values.
inline KmeansResult kmeans_1d(const std::vector<double>& pts, int k, std::uint64_t seed,
                              int restarts = 50) {
    std::set<double> distinct(pts.begin(), pts.end());
    if (static_cast<int>(distinct.size()) < k)
        throw DegenerateInput("k-means needs >= " + std::to_string(k) + " distinct values, got " +
                              std::to_string(distinct.size()));
    KmeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    std::vector<double> centers;
    std::vector<int> assign;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        double inertia = detail::lloyd_run(pts, k, rng, centers, assign);
        if (inertia < best.inertia) {
            best.inertia = inertia;
            best.centers = centers;
            best.assignments = assign;
        }
    }
    // Order clusters by center value.
    std::vector<int> order(k);
    for (int c = 0; c < k; ++c) order[c] = c;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return best.centers[a] < best.centers[b]; });
    std::vector<int> rank(k);
    for (int pos = 0; pos < k; ++pos) rank[order[pos]] = pos;
    std::vector<double> sorted_centers(k);
    for (int c = 0; c < k; ++c) sorted_centers[rank[c]] = best.centers[c];
    best.centers = sorted_centers;
    for (int& a : best.assignments) a = rank[a];
    return best;
}

}  // namespace biovoice
