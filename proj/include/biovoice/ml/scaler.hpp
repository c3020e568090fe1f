#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"

namespace biovoice {

using Matrix = std::vector<std::vector<double>>;  // row = sample

// Column standardization fitted on training data only. Constant columns get
// std replaced by 1 and are flagged.
struct ScalerModel {
    std::vector<double> mean;
    std::vector<double> stddev;           // population, never zero
    std::vector<char> constant_feature;   // 1 where the training column was constant

    // Content hash of the fitted parameters; the harness uses it to assert the
    // same fit is applied to train and test.
    std::uint64_t fingerprint() const {
        std::uint64_t h = fnv1a64(mean);
        h = fnv1a64(stddev, h);
        if (!constant_feature.empty())
            h = fnv1a64(constant_feature.data(), constant_feature.size(), h);
        return h;
    }
};

inline ScalerModel fit_scaler(const Matrix& X) {
    if (X.empty() || X[0].empty()) throw EmptyMatrix("fit_scaler: empty training matrix");
    const std::size_t d = X[0].size();
    ScalerModel m;
    m.mean.assign(d, 0.0);
    m.stddev.assign(d, 0.0);
    m.constant_feature.assign(d, 0);
    for (const auto& row : X)
        for (std::size_t j = 0; j < d; ++j) m.mean[j] += row[j];
    for (double& v : m.mean) v /= static_cast<double>(X.size());
    for (const auto& row : X)
        for (std::size_t j = 0; j < d; ++j) {
            double c = row[j] - m.mean[j];
            m.stddev[j] += c * c;
        }
    for (std::size_t j = 0; j < d; ++j) {
        m.stddev[j] = std::sqrt(m.stddev[j] / static_cast<double>(X.size()));
        if (m.stddev[j] == 0.0) {
            m.stddev[j] = 1.0;
            m.constant_feature[j] = 1;
        }
    }
    return m;
}

inline Matrix apply_scaler(const ScalerModel& m, const Matrix& X) {
    Matrix out = X;
    for (auto& row : out)
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] = (row[j] - m.mean[j]) / m.stddev[j];
    return out;
}

}  // namespace biovoice
