#pragma once
#include <cstdint>
#include <filesystem>

#include "riskmarket/types.hpp"

namespace riskmarket {

/// Binary-labeled regression data: M rows of K features with labels in
/// {+1, -1}.
struct Dataset {
    Matrix features; // M x K
    Vector labels;   // +1 / -1

    int num_rows() const { return static_cast<int>(features.rows()); }
    int num_features() const { return static_cast<int>(features.cols()); }
};

void validate_dataset(const Dataset& data);

/// CSV with columns x_1,...,x_K,y (y in {+1,-1}); a non-numeric first line
/// is treated as a header.
Dataset load_dataset_csv(const std::filesystem::path& path);

/// Seeded generator: standard-normal features, labels drawn with logistic
/// noise from a hidden normal weight vector. The spec is small enough to
/// embed in run configurations, which keeps synthetic runs reproducible.
struct SyntheticDatasetSpec {
    int m = 50;
    int k = 3;
    std::uint64_t seed = 1;
    double weight_scale = 1.0;
};

Dataset make_synthetic_dataset(const SyntheticDatasetSpec& spec);

} // namespace riskmarket
