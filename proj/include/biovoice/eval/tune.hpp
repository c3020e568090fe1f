#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/parallel.hpp"
#include "biovoice/eval/metrics.hpp"
#include "biovoice/ml/classifier.hpp"

namespace biovoice {

struct TuneResult {
    std::size_t best_index = 0;
    HyperParams best;
    std::vector<double> macro_f1;  // aggregated LOO macro-F1 per grid cell
};

// Leave-one-out tuning: every grid cell is scored by macro-F1 of its n
// held-out predictions; ties keep the earliest grid cell. A fold whose
// training rows collapse to a single class predicts that class.
//
// Cost sharing (all exact, not approximations):
//  - DTree: split choice never looks at the depth budget, so one unbounded
//    tree per (fold, min_leaf) answers every max_depth cell via truncated
//    prediction.
//  - RF: per-tree seeding and hash-chained node seeds make a (300, unbounded)
//    forest contain every (n_trees, max_depth) sub-grid model; one forest per
//    fold answers all cells.
//  - SVM: one Gram matrix per distinct gamma is shared by all folds and C
//    values; held-out decisions are Gram lookups.
inline TuneResult loo_tune(ClassifierKind kind, const std::vector<HyperParams>& grid,
                           const Matrix& X, const std::vector<int>& y, std::uint64_t seed,
                           unsigned jobs = 1) {
    const std::size_t n = X.size(), G = grid.size();
    if (G == 0) throw RangeViolation("loo_tune: empty hyperparameter grid");
    std::size_t count[2] = {0, 0};
    for (int v : y) ++count[v];
    if (count[0] == 0 || count[1] == 0)
        throw SingleClassTraining("loo_tune: training labels contain one class");

    std::vector<std::vector<int>> pred(G, std::vector<int>(n, 0));
    // Fold i is degenerate when row i is the last member of its class.
    auto degenerate_prediction = [&](std::size_t i) -> int {
        return count[y[i]] == 1 ? 1 - y[i] : -1;
    };
    auto build_fold = [&](std::size_t i, Matrix& fx, std::vector<int>& fy) {
        fx.clear();
        fy.clear();
        fx.reserve(n - 1);
        fy.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            fx.push_back(X[j]);
            fy.push_back(y[j]);
        }
    };

    switch (kind) {
        case ClassifierKind::NB:
        case ClassifierKind::MLP: {
            parallel_for(n, jobs, [&](std::size_t i) {
                const int deg = degenerate_prediction(i);
                if (deg >= 0) {
                    for (std::size_t g = 0; g < G; ++g) pred[g][i] = deg;
                    return;
                }
                Matrix fx;
                std::vector<int> fy;
                build_fold(i, fx, fy);
                for (std::size_t g = 0; g < G; ++g) {
                    TrainedModel m = train_classifier(kind, grid[g], fx, fy, seed);
                    pred[g][i] = m.predict_one(X[i]);
                }
            });
            break;
        }
        case ClassifierKind::DTree: {
            std::vector<std::size_t> leafs;  // distinct min_leaf, grid order
            for (const auto& h : grid)
                if (std::find(leafs.begin(), leafs.end(), h.min_leaf) == leafs.end())
                    leafs.push_back(h.min_leaf);
            parallel_for(n, jobs, [&](std::size_t i) {
                const int deg = degenerate_prediction(i);
                if (deg >= 0) {
                    for (std::size_t g = 0; g < G; ++g) pred[g][i] = deg;
                    return;
                }
                Matrix fx;
                std::vector<int> fy;
                build_fold(i, fx, fy);
                for (std::size_t leaf : leafs) {
                    DecisionTree tree;
                    tree.max_depth = -1;
                    tree.min_leaf = leaf;
                    tree.fit(fx, fy);
                    for (std::size_t g = 0; g < G; ++g)
                        if (grid[g].min_leaf == leaf)
                            pred[g][i] = tree.predict_one(X[i], grid[g].max_depth);
                }
            });
            break;
        }
        case ClassifierKind::RF: {
            std::vector<std::pair<int, int>> cells;
            for (const auto& h : grid) cells.emplace_back(h.n_trees, h.max_depth);
            parallel_for(n, jobs, [&](std::size_t i) {
                const int deg = degenerate_prediction(i);
                if (deg >= 0) {
                    for (std::size_t g = 0; g < G; ++g) pred[g][i] = deg;
                    return;
                }
                Matrix fx;
                std::vector<int> fy;
                build_fold(i, fx, fy);
                RandomForest forest;
                forest.seed = seed;
                const std::vector<int> cp = forest.fit_predict_point(fx, fy, X[i], cells);
                for (std::size_t g = 0; g < G; ++g) pred[g][i] = cp[g];
            });
            break;
        }
        case ClassifierKind::SVM: {
            // Resolve "scale" on the full tuning matrix once; the final model
            // trained on this matrix resolves to the identical value.
            const double scale_gamma = rbf_gamma_scale(X);
            std::vector<double> gammas;  // distinct resolved values, grid order
            std::vector<double> resolved(G);
            for (std::size_t g = 0; g < G; ++g) {
                resolved[g] = grid[g].gamma > 0.0 ? grid[g].gamma : scale_gamma;
                if (std::find(gammas.begin(), gammas.end(), resolved[g]) == gammas.end())
                    gammas.push_back(resolved[g]);
            }
            for (double gamma : gammas) {
                const std::vector<double> gram = rbf_gram(X, gamma);
                parallel_for(n, jobs, [&](std::size_t i) {
                    const int deg = degenerate_prediction(i);
                    if (deg >= 0) {
                        for (std::size_t g = 0; g < G; ++g)
                            if (resolved[g] == gamma) pred[g][i] = deg;
                        return;
                    }
                    std::vector<std::uint32_t> rows;
                    rows.reserve(n - 1);
                    std::vector<signed char> ypm;
                    ypm.reserve(n - 1);
                    for (std::size_t j = 0; j < n; ++j) {
                        if (j == i) continue;
                        rows.push_back(static_cast<std::uint32_t>(j));
                        ypm.push_back(y[j] == 1 ? 1 : -1);
                    }
                    for (std::size_t g = 0; g < G; ++g) {
                        if (resolved[g] != gamma) continue;
                        SvmSolution sol = smo_solve(gram, n, rows, ypm, grid[g].C);
                        double dec = sol.b;
                        for (std::size_t t = 0; t < rows.size(); ++t)
                            dec += sol.alpha[t] * static_cast<double>(ypm[t]) *
                                   gram[static_cast<std::size_t>(rows[t]) * n + i];
                        pred[g][i] = dec > 0.0 ? 1 : 0;
                    }
                });
            }
            break;
        }
    }

    TuneResult out;
    out.macro_f1.resize(G);
    double best = -1.0;
    for (std::size_t g = 0; g < G; ++g) {
        out.macro_f1[g] = macro_metrics(pred[g], y).f1;
        if (out.macro_f1[g] > best) {
            best = out.macro_f1[g];
            out.best_index = g;
        }
    }
    out.best = grid[out.best_index];
    return out;
}

}  // namespace biovoice
