#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/rng.hpp"
#include "biovoice/ml/scaler.hpp"

namespace biovoice {

// Bagged forest of entropy-split trees over quantile-binned features with
// sqrt(d) feature subsampling per node.
//
// Determinism layout: tree t draws its bootstrap from mix(seed, t); each
// node's feature subsample comes from a seed hash-chained from its parent
// (mix(node_seed, 1|2)), never from a shared sequential stream; split choice
// never looks at the remaining depth budget. Consequences, all exact:
//   - predict(x, T, D) on an unbounded forest equals the prediction of a
//     forest trained natively with T trees and max_depth D, so one big fit
//     serves a whole (trees x depth) grid;
//   - fit_predict_point can expand only the root-to-leaf path containing a
//     single query point and still reproduce fit()+predict() bit-exactly,
//     which makes leave-one-out tuning affordable.
struct RandomForest {
    int n_trees = 100;
    int max_depth = -1;  // < 0 = unbounded
    std::size_t min_leaf = 1;
    std::size_t n_bins = 64;
    std::uint64_t seed = 0;

    struct Node {
        int feature = -1;  // -1 = leaf
        double threshold = 0.0;
        int left = -1, right = -1;
        std::uint32_t count[2] = {0, 0};
    };
    struct Tree {
        std::vector<Node> nodes;
    };
    std::vector<Tree> trees;

    void fit(const Matrix& X, const std::vector<int>& y) {
        validate(X, y);
        const FitData fd = prepare(X, y, n_bins);
        trees.assign(static_cast<std::size_t>(n_trees), {});
        std::vector<std::uint32_t> rows(fd.n), scratch(fd.n);
        for (int t = 0; t < n_trees; ++t) {
            Rng boot(mix_seed(seed, static_cast<std::uint64_t>(t)));
            for (std::size_t i = 0; i < fd.n; ++i)
                rows[i] = static_cast<std::uint32_t>(boot.below(fd.n));
            const std::uint64_t root_seed =
                mix_seed(mix_seed(seed, static_cast<std::uint64_t>(t)), 0x9e3779b97f4a7c15ULL);
            build_node(trees[static_cast<std::size_t>(t)], fd, rows, 0,
                       static_cast<std::uint32_t>(fd.n), 0, root_seed, scratch);
        }
    }

    // Majority vote over the first `trees_used` trees (all when < 0) with each
    // tree truncated at depth_limit (< 0 = full depth). Ties keep class 0.
    int predict_one(const std::vector<double>& x, int trees_used = -1,
                    int depth_limit = -1) const {
        const std::size_t limit =
            trees_used < 0
                ? trees.size()
                : std::min<std::size_t>(trees.size(), static_cast<std::size_t>(trees_used));
        std::size_t votes[2] = {0, 0};
        for (std::size_t t = 0; t < limit; ++t) {
            const auto& nodes = trees[t].nodes;
            int node = 0, depth = 0;
            while (nodes[node].feature >= 0 && (depth_limit < 0 || depth < depth_limit)) {
                node = (x[nodes[node].feature] <= nodes[node].threshold) ? nodes[node].left
                                                                         : nodes[node].right;
                ++depth;
            }
            ++votes[nodes[node].count[1] > nodes[node].count[0] ? 1 : 0];
        }
        return votes[1] > votes[0] ? 1 : 0;
    }

    std::vector<int> predict(const Matrix& X, int trees_used = -1, int depth_limit = -1) const {
        std::vector<int> out(X.size());
        for (std::size_t i = 0; i < X.size(); ++i)
            out[i] = predict_one(X[i], trees_used, depth_limit);
        return out;
    }

    // For each (trees_used, depth_limit) cell: the prediction this forest
    // (with this seed/min_leaf/n_bins, trained on X, y) would give for x.
    // Expands only the path containing x per tree; exact by construction.
    std::vector<int> fit_predict_point(const Matrix& X, const std::vector<int>& y,
                                       const std::vector<double>& x,
                                       const std::vector<std::pair<int, int>>& cells) const {
        validate(X, y);
        const FitData fd = prepare(X, y, n_bins);
        int max_trees = 0;
        for (const auto& c : cells) max_trees = std::max(max_trees, c.first);

        // Per tree, the majority class at each depth along x's path.
        std::vector<std::vector<std::uint8_t>> path_majority(
            static_cast<std::size_t>(max_trees));
        std::vector<std::uint32_t> rows(fd.n), keep;
        for (int t = 0; t < max_trees; ++t) {
            Rng boot(mix_seed(seed, static_cast<std::uint64_t>(t)));
            rows.resize(fd.n);
            for (std::size_t i = 0; i < fd.n; ++i)
                rows[i] = static_cast<std::uint32_t>(boot.below(fd.n));
            std::uint64_t node_seed =
                mix_seed(mix_seed(seed, static_cast<std::uint64_t>(t)), 0x9e3779b97f4a7c15ULL);
            auto& path = path_majority[static_cast<std::size_t>(t)];
            for (;;) {
                std::uint32_t c0 = 0, c1 = 0;
                for (std::uint32_t r : rows) (fd.labels[r] ? c1 : c0)++;
                path.push_back(c1 > c0 ? 1 : 0);
                if (c0 == 0 || c1 == 0 || rows.size() < 2 * min_leaf) break;
                const Split sp = choose_split(fd, rows.data(), rows.data() + rows.size(), c0, c1,
                                              node_seed, min_leaf);
                if (sp.feature < 0) break;
                const double thr =
                    fd.edges[static_cast<std::size_t>(sp.feature)]
                            [static_cast<std::size_t>(sp.bin)];
                const bool go_left = x[static_cast<std::size_t>(sp.feature)] <= thr;
                keep.clear();
                const std::uint8_t* col =
                    fd.codes.data() + static_cast<std::size_t>(sp.feature) * fd.n;
                for (std::uint32_t r : rows) {
                    const bool left = col[r] <= static_cast<std::uint8_t>(sp.bin);
                    if (left == go_left) keep.push_back(r);
                }
                rows.swap(keep);
                node_seed = mix_seed(node_seed, go_left ? 1 : 2);
            }
        }

        std::vector<int> out;
        out.reserve(cells.size());
        for (const auto& cell : cells) {
            std::size_t votes[2] = {0, 0};
            for (int t = 0; t < cell.first && t < max_trees; ++t) {
                const auto& path = path_majority[static_cast<std::size_t>(t)];
                const std::size_t last = path.size() - 1;
                const std::size_t depth =
                    cell.second < 0 ? last : std::min<std::size_t>(last, static_cast<std::size_t>(cell.second));
                ++votes[path[depth]];
            }
            out.push_back(votes[1] > votes[0] ? 1 : 0);
        }
        return out;
    }

private:
    struct FitData {
        std::size_t n = 0, d = 0, m = 0;  // m = per-node feature subsample size
        std::vector<std::vector<double>> edges;  // per feature, ascending
        std::vector<std::uint8_t> codes;         // feature-major [f * n + row]
        std::vector<std::uint8_t> labels;
        std::vector<double> xlogx;  // k * log2(k), k in [0, n]
    };

    struct Split {
        int feature = -1;
        int bin = -1;
    };

    static void validate(const Matrix& X, const std::vector<int>& y) {
        if (X.empty()) throw EmptyMatrix("RandomForest: empty training matrix");
        std::size_t count[2] = {0, 0};
        for (int v : y) ++count[v];
        if (count[0] == 0 || count[1] == 0)
            throw SingleClassTraining("RandomForest: training labels contain one class");
        for (const auto& row : X)
            if (!all_finite(row)) throw NonFiniteFeature("RandomForest: non-finite feature");
    }

    static FitData prepare(const Matrix& X, const std::vector<int>& y, std::size_t n_bins) {
        FitData fd;
        fd.n = X.size();
        fd.d = X[0].size();
        if (fd.d > 256) throw RangeViolation("RandomForest: supports at most 256 features");
        if (n_bins < 2 || n_bins > 64)
            throw RangeViolation("RandomForest: n_bins must be in [2, 64]");
        fd.m = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(fd.d)))));
        fd.edges.assign(fd.d, {});
        std::vector<double> col(fd.n);
        for (std::size_t j = 0; j < fd.d; ++j) {
            for (std::size_t i = 0; i < fd.n; ++i) col[i] = X[i][j];
            std::sort(col.begin(), col.end());
            auto& edges = fd.edges[j];
            for (std::size_t b = 1; b < n_bins; ++b) {
                const std::size_t pos = (b * (fd.n - 1)) / n_bins;  // quantile b / n_bins
                const double v = col[pos];
                if (edges.empty() || v > edges.back()) edges.push_back(v);
            }
            // An edge equal to the column max would only offer empty-right
            // splits; drop it.
            if (!edges.empty() && edges.back() >= col.back()) edges.pop_back();
        }
        fd.codes.assign(fd.n * fd.d, 0);
        for (std::size_t j = 0; j < fd.d; ++j) {
            const auto& edges = fd.edges[j];
            std::uint8_t* out = fd.codes.data() + j * fd.n;
            for (std::size_t i = 0; i < fd.n; ++i)
                out[i] = static_cast<std::uint8_t>(
                    std::lower_bound(edges.begin(), edges.end(), X[i][j]) - edges.begin());
        }
        fd.labels.resize(fd.n);
        for (std::size_t i = 0; i < fd.n; ++i)
            fd.labels[i] = static_cast<std::uint8_t>(y[i]);
        fd.xlogx.resize(fd.n + 1);
        fd.xlogx[0] = 0.0;
        for (std::size_t k = 1; k <= fd.n; ++k) {
            const double kd = static_cast<double>(k);
            fd.xlogx[k] = kd * std::log2(kd);
        }
        return fd;
    }

    // Entropy-gain split over the node's rows, scanning the sqrt(d) feature
    // subsample drawn from node_seed in ascending feature order and candidate
    // bins in ascending order; the first strict maximum wins. Gains are
    // compared as n*gain (same ordering) via the xlogx table.
    static Split choose_split(const FitData& fd, const std::uint32_t* rows_begin,
                              const std::uint32_t* rows_end, std::uint32_t c0, std::uint32_t c1,
                              std::uint64_t node_seed, std::size_t min_leaf) {
        const std::size_t n_node = static_cast<std::size_t>(rows_end - rows_begin);
        Rng nr(node_seed);
        std::uint32_t feat[256];
        const std::size_t d = fd.d;
        for (std::size_t j = 0; j < d; ++j) feat[j] = static_cast<std::uint32_t>(j);
        for (std::size_t i = 0; i < fd.m; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(nr.below(d - i));
            std::swap(feat[i], feat[j]);
        }
        std::sort(feat, feat + fd.m);

        const double parent = fd.xlogx[n_node] - fd.xlogx[c0] - fd.xlogx[c1];
        const double min_gain = 1e-12 * static_cast<double>(n_node);
        Split best;
        double best_score = min_gain;

        std::uint32_t hist[64][2];
        for (std::size_t fi = 0; fi < fd.m; ++fi) {
            const std::uint32_t f = feat[fi];
            const std::size_t n_edges = fd.edges[f].size();
            if (n_edges == 0) continue;
            const std::uint8_t* col = fd.codes.data() + static_cast<std::size_t>(f) * fd.n;
            std::uint8_t lo = 255, hi = 0;
            for (std::size_t b = 0; b <= n_edges; ++b) hist[b][0] = hist[b][1] = 0;
            for (const std::uint32_t* r = rows_begin; r != rows_end; ++r) {
                const std::uint8_t c = col[*r];
                ++hist[c][fd.labels[*r]];
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            if (lo == hi) continue;  // single occupied bin: no split available
            std::uint32_t l0 = 0, l1 = 0;
            // Candidates below lo leave the left side empty; candidates at or
            // above hi leave the right side empty. Scan [lo, min(hi, n_edges)).
            const std::size_t b_end = std::min<std::size_t>(hi, n_edges);
            for (std::size_t b = lo; b < b_end; ++b) {
                l0 += hist[b][0];
                l1 += hist[b][1];
                const std::uint32_t nl = l0 + l1;
                const std::uint32_t nrr = static_cast<std::uint32_t>(n_node) - nl;
                if (nl < min_leaf || nrr < min_leaf) continue;
                const std::uint32_t r0 = c0 - l0, r1 = c1 - l1;
                const double child = (fd.xlogx[nl] - fd.xlogx[l0] - fd.xlogx[l1]) +
                                     (fd.xlogx[nrr] - fd.xlogx[r0] - fd.xlogx[r1]);
                const double score = parent - child;
                if (score > best_score) {
                    best_score = score;
                    best.feature = static_cast<int>(f);
                    best.bin = static_cast<int>(b);
                }
            }
        }
        return best;
    }

    void build_node(Tree& tree, const FitData& fd, std::vector<std::uint32_t>& rows,
                    std::size_t begin, std::size_t end, int depth, std::uint64_t node_seed,
                    std::vector<std::uint32_t>& scratch) const {
        Node nd;
        for (std::size_t i = begin; i < end; ++i) ++nd.count[fd.labels[rows[i]]];
        const int me = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(nd);

        const std::size_t n_node = end - begin;
        const bool pure = nd.count[0] == 0 || nd.count[1] == 0;
        if (pure || (max_depth >= 0 && depth >= max_depth) || n_node < 2 * min_leaf) return;

        const Split sp = choose_split(fd, rows.data() + begin, rows.data() + end, nd.count[0],
                                      nd.count[1], node_seed, min_leaf);
        if (sp.feature < 0) return;

        // Stable two-way partition of [begin, end) with left rows first.
        const std::uint8_t* col = fd.codes.data() + static_cast<std::size_t>(sp.feature) * fd.n;
        std::size_t nl = 0, nr_count = 0;
        for (std::size_t i = begin; i < end; ++i) {
            if (col[rows[i]] <= static_cast<std::uint8_t>(sp.bin))
                rows[begin + nl++] = rows[i];
            else
                scratch[nr_count++] = rows[i];
        }
        for (std::size_t i = 0; i < nr_count; ++i) rows[begin + nl + i] = scratch[i];

        tree.nodes[me].feature = sp.feature;
        tree.nodes[me].threshold =
            fd.edges[static_cast<std::size_t>(sp.feature)][static_cast<std::size_t>(sp.bin)];
        const int l = static_cast<int>(tree.nodes.size());
        tree.nodes[me].left = l;
        build_node(tree, fd, rows, begin, begin + nl, depth + 1, mix_seed(node_seed, 1), scratch);
        const int r = static_cast<int>(tree.nodes.size());
        tree.nodes[me].right = r;
        build_node(tree, fd, rows, begin + nl, end, depth + 1, mix_seed(node_seed, 2), scratch);
    }
};

}  // namespace biovoice
