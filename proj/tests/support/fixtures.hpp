#pragma once

// Deterministic datasets for tests.

#include "missq/dataset.hpp"
#include "missq/missgen.hpp"
#include "missq/rng.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace missq::fixtures {

inline double normal(Rng& rng) {
    // Box–Muller; avoids log(0).
    const double u1 = 1.0 - rng.uniform01();
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline VariableColumn numeric_column(std::string name, const std::vector<double>& values) {
    std::vector<std::optional<double>> cells(values.begin(), values.end());
    return VariableColumn::numerical(std::move(name), cells);
}

inline VariableColumn numeric_column(std::string name, const std::vector<std::optional<double>>& cells) {
    return VariableColumn::numerical(std::move(name), cells);
}

inline VariableColumn label_column(std::string name, const std::vector<std::optional<std::string>>& cells) {
    return VariableColumn::categorical(std::move(name), cells);
}

/// Complete 116-item table shaped like the Coimbra breast-cancer data: nine
/// continuous predictors plus a binary Classification (52 × 1, 64 × 2).
inline IncompleteDataset coimbra_like(std::uint64_t seed = 2018) {
    Rng rng(seed);
    const std::size_t n = 116;
    struct Shape {
        const char* name;
        double mean;
        double sd;
        double lo;
        int decimals;
    };
    const Shape shapes[] = {
        {"Age", 57.3, 16.1, 24.0, 0},        {"BMI", 27.6, 5.0, 18.3, 2},
        {"Glucose", 97.8, 22.5, 60.0, 0},    {"Insulin", 10.0, 10.1, 2.4, 3},
        {"HOMA", 2.7, 3.6, 0.47, 4},         {"Leptin", 26.6, 19.2, 4.3, 4},
        {"Adiponectin", 10.2, 6.8, 1.66, 4}, {"Resistin", 14.7, 12.4, 3.2, 4},
        {"MCP_1", 534.6, 345.9, 45.8, 3},
    };
    std::vector<VariableColumn> cols;
    for (const auto& s : shapes) {
        std::vector<double> v(n);
        const double scale = std::pow(10.0, s.decimals);
        for (auto& x : v) {
            double raw = s.mean + s.sd * normal(rng);
            if (raw < s.lo) raw = s.lo + std::fabs(normal(rng)) * s.sd * 0.1;
            x = std::round(raw * scale) / scale;
        }
        cols.push_back(numeric_column(s.name, v));
    }
    std::vector<double> cls(n);
    for (std::size_t i = 0; i < n; ++i) cls[i] = i < 52 ? 1.0 : 2.0;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(cls[i], cls[rng.below(i + 1)]);
    cols.push_back(numeric_column("Classification", cls));
    return IncompleteDataset("coimbra_like", std::move(cols));
}

/// Complete table of `k` independent standard-normal columns V0..V{k-1}.
inline IncompleteDataset normal_table(std::size_t n, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<VariableColumn> cols;
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> v(n);
        for (auto& x : v) x = normal(rng);
        cols.push_back(numeric_column("V" + std::to_string(j), v));
    }
    return IncompleteDataset("normal_table", std::move(cols));
}

/// Random incomplete dataset: mixed numerical/categorical columns with a
/// per-column missing probability drawn in [0, 1].
inline IncompleteDataset random_dataset(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<VariableColumn> cols;
    for (std::size_t j = 0; j < k; ++j) {
        const double p_missing = rng.uniform01() < 0.1 ? (rng.uniform01() < 0.5 ? 0.0 : 1.0) : rng.uniform01();
        const bool categorical = rng.uniform01() < 0.25;
        const auto name = "v" + std::to_string(j);
        if (categorical) {
            const auto levels = 1 + rng.below(5);
            std::vector<std::optional<std::string>> cells(n);
            for (auto& c : cells)
                if (rng.uniform01() >= p_missing) c = std::string(1, static_cast<char>('a' + rng.below(levels)));
            cols.push_back(label_column(name, cells));
        } else {
            const int style = static_cast<int>(rng.below(3));
            std::vector<std::optional<double>> cells(n);
            for (auto& c : cells) {
                if (rng.uniform01() < p_missing) continue;
                if (style == 0) c = normal(rng);
                else if (style == 1) c = rng.uniform(-5.0, 20.0);
                else c = std::exp(normal(rng));
            }
            cols.push_back(numeric_column(name, cells));
        }
    }
    return IncompleteDataset("random", std::move(cols));
}


/// Joint-missingness targets of the five BreastCancer_JM pairs.
inline MissingnessSpec breast_cancer_jm_spec(std::uint64_t seed = 7) {
    MissingnessSpec spec;
    spec.seed = seed;
    spec.mode = GenMode::jm;
    spec.jm_pairs = {
        {"Age", "BMI", 0.32, 0.34, JmPattern::below, 0.036},
        {"Glucose", "Insulin", 0.33, 0.33, JmPattern::below, 0.073},
        {"HOMA", "Leptin", 0.26, 0.41, JmPattern::equal, 0.107},
        {"Adiponectin", "Resistin", 0.46, 0.33, JmPattern::above, 0.211},
        {"MCP_1", "Classification", 0.46, 0.50, JmPattern::above, 0.383},
    };
    return spec;
}

/// Conditional-missingness structures of the five BreastCancer_CM pairs.
inline MissingnessSpec breast_cancer_cm_spec(std::uint64_t seed = 7) {
    MissingnessSpec spec;
    spec.seed = seed;
    spec.mode = GenMode::cm;
    spec.cm_pairs = {
        {"Age", "BMI", 0.28, RangeType::medium, kLowCm},
        {"Glucose", "Insulin", 0.15, RangeType::high, kMediumCm},
        {"HOMA", "Leptin", 0.26, RangeType::medium, kHighCm},
        {"Adiponectin", "Resistin", 0.25, RangeType::medium, kLowCm},
        {"MCP_1", "Classification", 0.14, RangeType::low, kMediumCm},
    };
    return spec;
}

}  // namespace missq::fixtures
