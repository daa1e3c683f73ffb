#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hqb/matrix.hpp"

namespace hqb {

// Synthetic three-arm spiral task. Problem complexity is controlled by the
// feature count: extra feature columns are fixed non-linear transforms of the
// spiral coordinates, and every column carries Gaussian noise whose scale
// grows with the feature count.
struct SpiralConfig {
    int n_points = 1500;
    int n_classes = 3;
    int n_features = 10;
    double noise_sigma = -1.0;  // < 0 means "compute via noise_for(n_features)"
    std::uint64_t seed = 0;
    double val_fraction = 0.2;

    double resolved_noise() const;
};

struct Dataset {
    Matrix features;          // [n_points x n_features]
    std::vector<int> labels;  // values in {0, ..., n_classes-1}
    std::vector<int> train_idx;
    std::vector<int> val_idx;
    int n_classes = 3;
    SpiralConfig config;  // provenance
    bool standardized = false;

    Matrix train_features() const { return features.take_rows(train_idx); }
    Matrix val_features() const { return features.take_rows(val_idx); }
    std::vector<int> train_labels() const;
    std::vector<int> val_labels() const;
};

// Noise scale as an affine function of the feature count.
double noise_for(int n_features);

// Generates the dataset. Deterministic: equal configs (including seed) give
// bit-identical results.
//
// Construction order (one mt19937_64 stream seeded from config.seed):
//   1. per-point parameter t ~ U[0,1), points in class-major order;
//      clean coordinates c1 = R*t*cos(2*pi*(t*turns + k/3)),
//                        c2 = R*t*sin(2*pi*(t*turns + k/3)),
//      with radius R = 3 and turns = 1.1
//   2. per extra column j >= 3: coefficients (a, b), a two-scale mixture
//      (odd columns U[0.3,0.9), even columns U[1.4,2.6)); the column's
//      transform cycles through
//      {3*sin(a*c1 + b*c2), 3*cos(a*c1 - b*c2), c1*c2, c1^2,
//       3*tanh(a*c1 + b*c2)} applied to the clean coordinates
//   3. per row, per column: standard normal z; stored value = base + sigma*z
// The train/val split is stratified by class and drawn from a separate stream
// derived from the seed, so importing an exported dataset reproduces it.
Dataset generate(const SpiralConfig& config);

// Shifts/scales every column by the train-split mean and standard deviation
// (population form); the validation split is transformed with the train
// statistics. A constant column is shifted only (scale 1, not 0).
Dataset standardize(const Dataset& dataset);

// CSV (f1,...,fF,label) plus a JSON sidecar holding the SpiralConfig.
void export_dataset(const Dataset& dataset, const std::string& csv_path, const std::string& sidecar_path);
Dataset import_dataset(const std::string& csv_path, const std::string& sidecar_path);

}  // namespace hqb
