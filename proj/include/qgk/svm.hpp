// Copyright 2026 The QGK Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Soft-margin C-SVM on a precomputed kernel, solved by sequential minimal
// optimization with maximal-violating-pair selection. The curvature guard
// lets the solver run on slightly indefinite (noisy) kernel matrices; box
// clipping keeps the iterates feasible in that case.

#ifndef QGK_SVM_HPP
#define QGK_SVM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "qgk/common.hpp"
#include "qgk/dataset.hpp"
#include "qgk/kernel.hpp"

namespace qgk {

struct SvmModel {
    std::vector<double> alpha;            // dual variables, one per training sample
    std::vector<double> coef;             // alpha_i * y_i
    std::vector<std::size_t> support_indices;  // indices with alpha_i > 0
    double bias = 0.0;
    double regularization_c = 1.0;
    double dual_objective = 0.0;
    long iterations = 0;
    bool converged = false;
};

namespace detail {

inline void extract_row(const KernelMatrix& k, std::size_t i, std::vector<double>& row) {
    row.resize(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) row[j] = k.at(i, j);
}

}  // namespace detail

/// Trains on the full given kernel matrix (callers restrict to the training
/// fold first). Deterministic given input order: ties in the working-pair
/// selection resolve to the lowest index.
inline SvmModel train_svm(const KernelMatrix& k, std::span<const int> labels,
                          double c_reg, double tol = 1e-3,
                          long max_iter = 200000) {
    const std::size_t n = k.size();
    if (labels.size() != n) throw data_error("label count does not match kernel");
    if (c_reg <= 0.0) throw data_error("svm C must be positive");
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == +1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw data_error("labels must be -1 or +1");
    }
    if (!has_pos || !has_neg) throw data_error("single-class training fold");
    for (double v : k.upper())
        if (!std::isfinite(v)) throw numeric_error("non-finite kernel entry");

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - sum(a)
    std::vector<double> row_i, row_j;

    const double tau = 1e-12;
    long it = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
        // i maximizes -y*grad over I_up, j minimizes it over I_low.
        std::ptrdiff_t i = -1, j = -1;
        double up_max = -std::numeric_limits<double>::infinity();
        double low_min = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -labels[t] * grad[t];
            const bool in_up = labels[t] > 0 ? alpha[t] < c_reg : alpha[t] > 0.0;
            const bool in_low = labels[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c_reg;
            if (in_up && v > up_max) {
                up_max = v;
                i = static_cast<std::ptrdiff_t>(t);
            }
            if (in_low && v < low_min) {
                low_min = v;
                j = static_cast<std::ptrdiff_t>(t);
            }
        }
        if (i < 0 || j < 0 || up_max - low_min < tol) {
            converged = true;
            break;
        }
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        detail::extract_row(k, ui, row_i);
        detail::extract_row(k, uj, row_j);

        // Move alpha_i by y_i*t and alpha_j by -y_j*t; curvature in t is
        // K_ii + K_jj - 2 K_ij independent of the labels.
        double eta = row_i[ui] + row_j[uj] - 2.0 * row_i[uj];
        if (eta < tau) eta = tau;
        double step = (up_max - low_min) / eta;

        // Clip to the box for both coordinates.
        if (labels[ui] > 0)
            step = std::min(step, c_reg - alpha[ui]);
        else
            step = std::min(step, alpha[ui]);
        if (labels[uj] > 0)
            step = std::min(step, alpha[uj]);
        else
            step = std::min(step, c_reg - alpha[uj]);

        const double di = labels[ui] * step;
        const double dj = -labels[uj] * step;
        alpha[ui] += di;
        alpha[uj] += dj;
        for (std::size_t t = 0; t < n; ++t)
            grad[t] += labels[t] * (row_i[t] * labels[ui] * di + row_j[t] * labels[uj] * dj);
    }

    SvmModel model;
    model.alpha = alpha;
    model.regularization_c = c_reg;
    model.iterations = it;
    model.converged = converged;
    model.coef.resize(n);
    for (std::size_t t = 0; t < n; ++t) model.coef[t] = alpha[t] * labels[t];
    for (std::size_t t = 0; t < n; ++t)
        if (alpha[t] > 0.0) model.support_indices.push_back(t);

    // Bias: average of -y*grad over free support vectors; falls back to the
    // midpoint of the feasible interval when every support vector is bound.
    double sum = 0.0;
    std::size_t free_count = 0;
    const double bound_eps = 1e-10 * c_reg;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > bound_eps && alpha[t] < c_reg - bound_eps) {
            sum += -labels[t] * grad[t];
            ++free_count;
        }
    }
    if (free_count > 0) {
        model.bias = sum / static_cast<double>(free_count);
    } else {
        double up_max = -std::numeric_limits<double>::infinity();
        double low_min = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -labels[t] * grad[t];
            const bool in_up = labels[t] > 0 ? alpha[t] < c_reg : alpha[t] > 0.0;
            const bool in_low = labels[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c_reg;
            if (in_up) up_max = std::max(up_max, v);
            if (in_low) low_min = std::min(low_min, v);
        }
        if (std::isfinite(up_max) && std::isfinite(low_min))
            model.bias = 0.5 * (up_max + low_min);
        else
            model.bias = std::isfinite(up_max) ? up_max : low_min;
    }

    double obj = 0.0;
    for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (1.0 - 0.5 * (grad[t] + 1.0));
    model.dual_objective = obj;  // sum(a) - 1/2 a'Qa, using Qa = grad + 1
    return model;
}

/// Decision rule sign(sum_i coef_i * k_row[i] + b); an exact zero counts
/// as +1.
inline int predict(const SvmModel& m, std::span<const double> k_row) {
    if (k_row.size() != m.coef.size())
        throw data_error("kernel row length does not match training size");
    double dec = m.bias;
    for (std::size_t i = 0; i < k_row.size(); ++i) dec += m.coef[i] * k_row[i];
    return dec >= 0.0 ? +1 : -1;
}

/// Maximal per-sample KKT violation of the trained model against its own
/// bias (diagnostic; bounded by the solver tolerance on converged models).
inline double kkt_residual(const SvmModel& m, const KernelMatrix& k,
                           std::span<const int> labels) {
    const std::size_t n = k.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = m.bias;
        for (std::size_t j = 0; j < n; ++j) f += m.coef[j] * k.at(i, j);
        const double margin = labels[i] * f;
        const double a = m.alpha[i];
        double viol = 0.0;
        if (a <= 0.0)
            viol = std::max(0.0, 1.0 - margin);
        else if (a >= m.regularization_c)
            viol = std::max(0.0, margin - 1.0);
        else
            viol = std::abs(margin - 1.0);
        worst = std::max(worst, viol);
    }
    return worst;
}

/// Pooled k-fold cross-validated accuracy: train on each fold complement,
/// predict the fold, count all predictions together.
inline double cv_accuracy(const KernelMatrix& k, std::span<const int> labels,
                          const FoldAssignment& folds, double c_reg,
                          double tol = 1e-3) {
    const std::size_t n = k.size();
    if (folds.fold_of.size() != n) throw data_error("fold assignment size mismatch");
    std::size_t correct = 0;
    std::vector<std::size_t> train_idx;
    std::vector<int> train_labels;
    std::vector<double> k_row;
    for (int f = 0; f < folds.fold_count; ++f) {
        train_idx.clear();
        train_labels.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (folds.fold_of[i] != f) {
                train_idx.push_back(i);
                train_labels.push_back(labels[i]);
            }
        }
        const KernelMatrix sub = k.subset(train_idx);
        const SvmModel model = train_svm(sub, train_labels, c_reg, tol);
        for (std::size_t i = 0; i < n; ++i) {
            if (folds.fold_of[i] != f) continue;
            k_row.resize(train_idx.size());
            for (std::size_t j = 0; j < train_idx.size(); ++j)
                k_row[j] = k.at(i, train_idx[j]);
            if (predict(model, k_row) == labels[i]) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace qgk

#endif  // QGK_SVM_HPP
