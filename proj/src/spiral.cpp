#include "hqb/spiral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hqb/seed.hpp"

namespace hqb {

namespace {

constexpr double kTurns = 1.1;
constexpr double kRadius = 3.0;  // arm gap ~ kRadius/3 must dominate the noise scale
constexpr double kTransformGain = 3.0;  // keeps bounded transforms above the noise floor
constexpr double kCoeffSmoothLow = 0.3, kCoeffSmoothHigh = 0.9;
constexpr double kCoeffOscLow = 1.4, kCoeffOscHigh = 2.6;

double menu_transform(int menu_id, double c1, double c2, double a, double b) {
    switch (menu_id) {
        case 0: return kTransformGain * std::sin(a * c1 + b * c2);
        case 1: return kTransformGain * std::cos(a * c1 - b * c2);
        case 2: return c1 * c2;
        case 3: return c1 * c1;
        default: return kTransformGain * std::tanh(a * c1 + b * c2);
    }
}

}  // namespace

double SpiralConfig::resolved_noise() const {
    return noise_sigma < 0.0 ? noise_for(n_features) : noise_sigma;
}

double noise_for(int n_features) {
    return 0.1 + 0.003 * static_cast<double>(n_features);
}

std::vector<int> Dataset::train_labels() const {
    std::vector<int> out(train_idx.size());
    for (std::size_t i = 0; i < train_idx.size(); ++i) out[i] = labels[train_idx[i]];
    return out;
}

std::vector<int> Dataset::val_labels() const {
    std::vector<int> out(val_idx.size());
    for (std::size_t i = 0; i < val_idx.size(); ++i) out[i] = labels[val_idx[i]];
    return out;
}

Dataset generate(const SpiralConfig& config) {
    if (config.n_points <= 0) throw std::invalid_argument("generate: n_points must be positive");
    if (config.n_features < 2) throw std::invalid_argument("generate: n_features must be >= 2");
    if (config.n_classes < 1) throw std::invalid_argument("generate: n_classes must be >= 1");
    if (config.n_points % config.n_classes != 0)
        throw std::invalid_argument("generate: n_points must be divisible by n_classes");
    if (config.val_fraction <= 0.0 || config.val_fraction >= 1.0)
        throw std::invalid_argument("generate: val_fraction must lie in (0,1)");

    const int n = config.n_points;
    const int classes = config.n_classes;
    const int per_class = n / classes;
    const int f = config.n_features;
    const double sigma = config.resolved_noise();

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // 1. spiral parameters and clean coordinates, class-major row order
    std::vector<double> c1(n), c2(n);
    std::vector<int> labels(n);
    for (int k = 0; k < classes; ++k) {
        for (int i = 0; i < per_class; ++i) {
            const int row = k * per_class + i;
            const double t = unit(rng);
            const double angle = 2.0 * std::numbers::pi *
                                 (t * kTurns + static_cast<double>(k) / classes);
            c1[row] = kRadius * t * std::cos(angle);
            c2[row] = kRadius * t * std::sin(angle);
            labels[row] = k;
        }
    }

    // 2. per-column transform coefficients, a two-scale mixture of smooth
    // views and oscillatory lifts
    std::uniform_real_distribution<double> coeff_low(kCoeffSmoothLow, kCoeffSmoothHigh);
    std::uniform_real_distribution<double> coeff_high(kCoeffOscLow, kCoeffOscHigh);
    std::vector<double> col_a(f, 0.0), col_b(f, 0.0);
    for (int j = 2; j < f; ++j) {
        const bool oscillatory = (j % 2) == 0;
        col_a[j] = oscillatory ? coeff_high(rng) : coeff_low(rng);
        col_b[j] = oscillatory ? coeff_high(rng) : coeff_low(rng);
    }

    // 3. noise; a standard normal is drawn for every cell regardless of sigma
    // so that the draw sequence does not depend on the noise scale
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix features(static_cast<std::size_t>(n), static_cast<std::size_t>(f));
    for (int row = 0; row < n; ++row) {
        for (int j = 0; j < f; ++j) {
            double base;
            if (j == 0) {
                base = c1[row];
            } else if (j == 1) {
                base = c2[row];
            } else {
                base = menu_transform((j - 2) % 5, c1[row], c2[row], col_a[j], col_b[j]);
            }
            features(row, j) = base + sigma * gauss(rng);
        }
    }

    // stratified split from a dedicated stream keyed by the seed only
    std::mt19937_64 split_rng(derive_seed(config.seed, "split"));
    const int val_per_class = static_cast<int>(std::lround(per_class * config.val_fraction));
    std::vector<int> train_idx, val_idx;
    train_idx.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < classes; ++k) {
        std::vector<int> rows(per_class);
        for (int i = 0; i < per_class; ++i) rows[i] = k * per_class + i;
        std::shuffle(rows.begin(), rows.end(), split_rng);
        for (int i = 0; i < per_class; ++i) {
            (i < val_per_class ? val_idx : train_idx).push_back(rows[i]);
        }
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());

    Dataset ds;
    ds.features = std::move(features);
    ds.labels = std::move(labels);
    ds.train_idx = std::move(train_idx);
    ds.val_idx = std::move(val_idx);
    ds.n_classes = classes;
    ds.config = config;
    ds.config.noise_sigma = sigma;
    return ds;
}

Dataset standardize(const Dataset& dataset) {
    const std::size_t cols = dataset.features.cols();
    const std::size_t n_train = dataset.train_idx.size();
    if (n_train == 0) throw std::invalid_argument("standardize: empty train split");

    std::vector<double> mean(cols, 0.0), sq_dev(cols, 0.0), scale(cols, 1.0);
    for (int r : dataset.train_idx)
        for (std::size_t c = 0; c < cols; ++c) mean[c] += dataset.features(static_cast<std::size_t>(r), c);
    for (std::size_t c = 0; c < cols; ++c) mean[c] /= static_cast<double>(n_train);

    for (int r : dataset.train_idx)
        for (std::size_t c = 0; c < cols; ++c) {
            const double d = dataset.features(static_cast<std::size_t>(r), c) - mean[c];
            sq_dev[c] += d * d;
        }
    for (std::size_t c = 0; c < cols; ++c) {
        const double var = sq_dev[c] / static_cast<double>(n_train);
        scale[c] = var > 1e-24 ? std::sqrt(var) : 1.0;  // constant column: shift only
    }

    Dataset out = dataset;
    for (std::size_t r = 0; r < out.features.rows(); ++r)
        for (std::size_t c = 0; c < cols; ++c)
            out.features(r, c) = (dataset.features(r, c) - mean[c]) / scale[c];
    out.standardized = true;
    return out;
}

void export_dataset(const Dataset& dataset, const std::string& csv_path, const std::string& sidecar_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("export_dataset: cannot open " + csv_path);
    for (std::size_t c = 0; c < dataset.features.cols(); ++c) csv << 'f' << (c + 1) << ',';
    csv << "label\n";
    char buf[32];
    for (std::size_t r = 0; r < dataset.features.rows(); ++r) {
        for (std::size_t c = 0; c < dataset.features.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", dataset.features(r, c));
            csv << buf << ',';
        }
        csv << dataset.labels[r] << '\n';
    }

    nlohmann::json j{
        {"n_points", dataset.config.n_points},     {"n_classes", dataset.config.n_classes},
        {"n_features", dataset.config.n_features}, {"noise_sigma", dataset.config.noise_sigma},
        {"seed", dataset.config.seed},             {"val_fraction", dataset.config.val_fraction},
        {"standardized", dataset.standardized},
    };
    std::ofstream sidecar(sidecar_path);
    if (!sidecar) throw std::runtime_error("export_dataset: cannot open " + sidecar_path);
    sidecar << j.dump(2) << '\n';
}

Dataset import_dataset(const std::string& csv_path, const std::string& sidecar_path) {
    std::ifstream sidecar(sidecar_path);
    if (!sidecar) throw std::runtime_error("import_dataset: cannot open " + sidecar_path);
    nlohmann::json j = nlohmann::json::parse(sidecar);
    SpiralConfig config;
    config.n_points = j.at("n_points").get<int>();
    config.n_classes = j.at("n_classes").get<int>();
    config.n_features = j.at("n_features").get<int>();
    config.noise_sigma = j.at("noise_sigma").get<double>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.val_fraction = j.at("val_fraction").get<double>();

    std::ifstream csv(csv_path);
    if (!csv) throw std::runtime_error("import_dataset: cannot open " + csv_path);
    std::string line;
    if (!std::getline(csv, line)) throw std::runtime_error("import_dataset: empty csv");

    Matrix features(static_cast<std::size_t>(config.n_points), static_cast<std::size_t>(config.n_features));
    std::vector<int> labels(static_cast<std::size_t>(config.n_points));
    std::size_t row = 0;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        if (row >= features.rows()) throw std::runtime_error("import_dataset: more rows than sidecar declares");
        std::stringstream ss(line);
        std::string cell;
        for (std::size_t c = 0; c < features.cols(); ++c) {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error("import_dataset: short row");
            features(row, c) = std::stod(cell);
        }
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("import_dataset: missing label");
        labels[row] = std::stoi(cell);
        ++row;
    }
    if (row != features.rows()) throw std::runtime_error("import_dataset: fewer rows than sidecar declares");

    // same dedicated split stream as generate()
    std::mt19937_64 split_rng(derive_seed(config.seed, "split"));
    const int per_class = config.n_points / config.n_classes;
    const int val_per_class = static_cast<int>(std::lround(per_class * config.val_fraction));
    std::vector<int> train_idx, val_idx;
    for (int k = 0; k < config.n_classes; ++k) {
        std::vector<int> rows(per_class);
        for (int i = 0; i < per_class; ++i) rows[i] = k * per_class + i;
        std::shuffle(rows.begin(), rows.end(), split_rng);
        for (int i = 0; i < per_class; ++i) {
            (i < val_per_class ? val_idx : train_idx).push_back(rows[i]);
        }
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());

    Dataset ds;
    ds.features = std::move(features);
    ds.labels = std::move(labels);
    ds.train_idx = std::move(train_idx);
    ds.val_idx = std::move(val_idx);
    ds.n_classes = config.n_classes;
    ds.config = config;
    ds.standardized = j.value("standardized", false);
    return ds;
}

}  // namespace hqb
