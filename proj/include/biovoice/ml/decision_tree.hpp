#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/ml/scaler.hpp"

namespace biovoice {

namespace detail {

inline double entropy2(std::size_t a, std::size_t b) {
    const double n = static_cast<double>(a + b);
    if (a == 0 || b == 0) return 0.0;
    double pa = a / n, pb = b / n;
    return -(pa * std::log2(pa) + pb * std::log2(pb));
}

}  // namespace detail

// Binary decision tree with gain-ratio splits on midpoint thresholds.
// max_depth < 0 means unbounded. Prediction can truncate at any depth and
// return the majority of the node reached, so one unbounded tree evaluates
// every smaller depth limit exactly.
struct DecisionTree {
    struct Node {
        int feature = -1;          // -1 = leaf
        double threshold = 0.0;    // x[feature] <= threshold goes left
        int left = -1, right = -1;
        std::size_t count[2] = {0, 0};
    };

    int max_depth = -1;
    std::size_t min_leaf = 1;
    std::vector<Node> nodes;

    void fit(const Matrix& X, const std::vector<int>& y) {
        if (X.empty()) throw EmptyMatrix("DecisionTree: empty training matrix");
        std::size_t count[2] = {0, 0};
        for (int v : y) ++count[v];
        if (count[0] == 0 || count[1] == 0)
            throw SingleClassTraining("DecisionTree: training labels contain one class");
        for (const auto& row : X)
            if (!all_finite(row)) throw NonFiniteFeature("DecisionTree: non-finite feature");
        nodes.clear();
        std::vector<std::size_t> idx(X.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        build(X, y, idx, 0);
    }

    int predict_one(const std::vector<double>& x, int depth_limit = -1) const {
        int node = 0, depth = 0;
        while (nodes[node].feature >= 0 && (depth_limit < 0 || depth < depth_limit)) {
            node = (x[nodes[node].feature] <= nodes[node].threshold) ? nodes[node].left
                                                                     : nodes[node].right;
            ++depth;
        }
        return majority(nodes[node]);
    }

    std::vector<int> predict(const Matrix& X, int depth_limit = -1) const {
        std::vector<int> out(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) out[i] = predict_one(X[i], depth_limit);
        return out;
    }

private:
    static int majority(const Node& nd) {
        return nd.count[1] > nd.count[0] ? 1 : 0;  // tie keeps the first class
    }

    int build(const Matrix& X, const std::vector<int>& y, const std::vector<std::size_t>& idx,
              int depth) {
        Node nd;
        for (std::size_t i : idx) ++nd.count[y[i]];
        const int me = static_cast<int>(nodes.size());
        nodes.push_back(nd);

        const bool pure = nd.count[0] == 0 || nd.count[1] == 0;
        if (pure || (max_depth >= 0 && depth >= max_depth) || idx.size() < 2 * min_leaf)
            return me;

        int best_feature = -1;
        double best_threshold = 0.0, best_ratio = 0.0;
        const double parent_h = detail::entropy2(nd.count[0], nd.count[1]);
        const std::size_t n = idx.size();
        const std::size_t d = X[0].size();
        std::vector<std::pair<double, int>> vals(n);  // (value, label), sorted per feature

        for (std::size_t f = 0; f < d; ++f) {
            for (std::size_t t = 0; t < n; ++t) vals[t] = {X[idx[t]][f], y[idx[t]]};
            std::sort(vals.begin(), vals.end());
            std::size_t left[2] = {0, 0};
            for (std::size_t t = 0; t + 1 < n; ++t) {
                ++left[vals[t].second];
                if (vals[t].first == vals[t + 1].first) continue;  // no boundary here
                const std::size_t nl = t + 1, nr = n - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                std::size_t right[2] = {nd.count[0] - left[0], nd.count[1] - left[1]};
                double child_h =
                    (static_cast<double>(nl) / n) * detail::entropy2(left[0], left[1]) +
                    (static_cast<double>(nr) / n) * detail::entropy2(right[0], right[1]);
                double gain = parent_h - child_h;
                if (gain <= 1e-12) continue;
                double pl = static_cast<double>(nl) / n;
                double split_info = -(pl * std::log2(pl) + (1.0 - pl) * std::log2(1.0 - pl));
                double ratio = gain / split_info;
                if (ratio > best_ratio + 1e-15) {
                    best_ratio = ratio;
                    best_feature = static_cast<int>(f);
                    best_threshold = vals[t].first + (vals[t + 1].first - vals[t].first) / 2.0;
                }
            }
        }
        if (best_feature < 0) return me;

        std::vector<std::size_t> li, ri;
        for (std::size_t i : idx) {
            if (X[i][best_feature] <= best_threshold)
                li.push_back(i);
            else
                ri.push_back(i);
        }
        nodes[me].feature = best_feature;
        nodes[me].threshold = best_threshold;
        const int l = build(X, y, li, depth + 1);
        nodes[me].left = l;
        const int r = build(X, y, ri, depth + 1);
        nodes[me].right = r;
        return me;
    }
};

}  // namespace biovoice
