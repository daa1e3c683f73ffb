#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "hqb/nn.hpp"
#include "hqb/seed.hpp"
#include "hqb/spiral.hpp"
#include "oracles.hpp"

using namespace hqb;

namespace {

Matrix random_batch(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = gauss(rng);
    return m;
}

}  // namespace

TEST_CASE("zero weights give uniform class probabilities") {
    MlpModel model({4, {}, 3});
    Matrix batch(2, 4);
    batch(0, 1) = 1.5;
    batch(1, 3) = -2.0;
    const Matrix probs = model.forward(batch);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 3; ++c) CHECK(probs(r, c) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("identity-like single layer maps one-hot inputs to their class") {
    MlpModel model({3, {}, 3});
    auto& p = model.params();
    for (int i = 0; i < 3; ++i) p[i * 3 + i] = 10.0;  // diagonal weights, zero bias
    Matrix batch(3, 3);
    for (int r = 0; r < 3; ++r) batch(r, r) = 1.0;
    const Matrix probs = model.forward(batch);
    for (std::size_t r = 0; r < 3; ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < 3; ++c)
            if (probs(r, c) > probs(r, best)) best = c;
        CHECK(best == r);
    }
}

TEST_CASE("forward matches the straightforward reimplementation") {
    std::mt19937_64 rng(5);
    ClassicalArch arch{7, {6, 8, 4}, 3};
    MlpModel model(arch);
    model.init_params(rng);
    const Matrix batch = random_batch(9, 7, rng);
    const Matrix got = model.forward(batch);
    const Matrix want = oracle::naive_mlp_forward(arch.layer_dims(), model.params(), batch);
    for (std::size_t r = 0; r < got.rows(); ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < got.cols(); ++c) {
            CHECK(std::abs(got(r, c) - want(r, c)) < 1e-12);
            sum += got(r, c);
        }
        CHECK(std::abs(sum - 1.0) < 1e-6);
    }
}

TEST_CASE("cross-entropy of near-perfect and uniform predictions") {
    MlpModel model({3, {}, 3});
    std::vector<double> grads;
    Matrix batch(1, 3);
    batch(0, 0) = 1.0;

    const double uniform_loss = model.loss_and_grads(batch, {0}, grads);
    CHECK(uniform_loss == doctest::Approx(std::log(3.0)).epsilon(1e-9));

    auto& p = model.params();
    for (int i = 0; i < 3; ++i) p[i * 3 + i] = 60.0;
    const double perfect_loss = model.loss_and_grads(batch, {0}, grads);
    CHECK(perfect_loss < 1e-10);
}

TEST_CASE("gradients match central finite differences") {
    std::mt19937_64 rng(17);
    MlpModel model({5, {6, 4}, 3});
    model.init_params(rng);
    const Matrix batch = random_batch(4, 5, rng);
    const std::vector<int> labels{0, 2, 1, 2};

    std::vector<double> grads;
    model.loss_and_grads(batch, labels, grads);

    const double h = 1e-5;
    std::vector<double> dummy;
    for (std::size_t i = 0; i < model.params().size(); ++i) {
        const double orig = model.params()[i];
        model.params()[i] = orig + h;
        const double up = model.loss_and_grads(batch, labels, dummy);
        model.params()[i] = orig - h;
        const double down = model.loss_and_grads(batch, labels, dummy);
        model.params()[i] = orig;
        const double fd = (up - down) / (2.0 * h);
        CHECK(std::abs(grads[i] - fd) <= std::max(1e-6, 1e-4 * std::abs(grads[i])));
    }
}

TEST_CASE("epochs=0 reports the untrained model") {
    std::mt19937_64 rng(3);
    MlpModel probe({4, {5}, 3});
    const Matrix x = random_batch(30, 4, rng);
    std::vector<int> y(30);
    for (std::size_t i = 0; i < 30; ++i) y[i] = static_cast<int>(i % 3);

    TrainConfig cfg;
    cfg.epochs = 0;
    cfg.seed = 77;
    const TrainOutcome outcome = train(probe, x, y, x, y, cfg);
    CHECK(outcome.train_acc_trace.size() == 1);
    CHECK(outcome.best_train_acc == outcome.train_acc_trace[0]);
    CHECK(outcome.best_val_acc == outcome.val_acc_trace[0]);

    // same seed, same init: accuracy of a freshly initialized model
    std::mt19937_64 init_rng(cfg.seed);
    MlpModel fresh({4, {5}, 3});
    fresh.init_params(init_rng);
    CHECK(outcome.best_train_acc == accuracy(fresh, x, y));
}

TEST_CASE("separable blobs are learned perfectly") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss(0.0, 0.25);
    Matrix x(80, 2);
    std::vector<int> y(80);
    for (std::size_t i = 0; i < 80; ++i) {
        const int k = static_cast<int>(i % 2);
        x(i, 0) = (k ? 2.5 : -2.5) + gauss(rng);
        x(i, 1) = (k ? -1.0 : 1.0) + gauss(rng);
        y[i] = k;
    }
    CHECK(oracle::logistic_train_accuracy(x, y, 2) == doctest::Approx(1.0));

    MlpModel model({2, {8}, 2});
    TrainConfig cfg;
    cfg.seed = 5;
    const TrainOutcome outcome = train(model, x, y, x, y, cfg);
    CHECK(outcome.best_train_acc == doctest::Approx(1.0));
}

TEST_CASE("hidden [10,10] reaches the accuracy bar on the easiest level") {
    SpiralConfig dc;
    dc.n_features = 10;
    dc.seed = 424242;
    const Dataset ds = standardize(generate(dc));
    const Matrix tx = ds.train_features(), vx = ds.val_features();
    const auto ty = ds.train_labels(), vy = ds.val_labels();

    double sum_train = 0.0, sum_val = 0.0;
    for (int run = 0; run < 5; ++run) {
        MlpModel model({10, {10, 10}, 3});
        TrainConfig cfg;
        cfg.seed = derive_seed(9000, "mlp-10-10", run);
        const TrainOutcome outcome = train(model, tx, ty, vx, vy, cfg);
        sum_train += outcome.best_train_acc;
        sum_val += outcome.best_val_acc;
    }
    CHECK(sum_train / 5.0 >= 0.90);
    CHECK(sum_val / 5.0 >= 0.90);
}

TEST_CASE("accuracy is invariant under evaluation order") {
    std::mt19937_64 rng(31);
    MlpModel model({6, {5}, 3});
    model.init_params(rng);
    const Matrix x = random_batch(40, 6, rng);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i) y[i] = static_cast<int>((i * 7) % 3);

    const double base = accuracy(model, x, y);
    std::vector<int> perm(40);
    for (std::size_t i = 0; i < 40; ++i) perm[i] = static_cast<int>((i * 13) % 40);
    Matrix xp = x.take_rows(perm);
    std::vector<int> yp(40);
    for (std::size_t i = 0; i < 40; ++i) yp[i] = y[perm[i]];
    CHECK(accuracy(model, xp, yp) == base);
}

TEST_CASE("parameter counts follow the layer-pair formula") {
    CHECK(ClassicalArch{10, {10, 10}, 3}.param_count() == 253);
    CHECK(ClassicalArch{10, {}, 3}.param_count() == 33);
    CHECK(MlpModel({10, {10, 10}, 3}).params().size() == 253);
}

TEST_CASE("adam takes the expected first step") {
    TrainConfig cfg;
    AdamOptimizer adam(1, cfg);
    std::vector<double> p{1.0};
    adam.step(p, {0.5});
    // bias-corrected first step is lr * g / (|g| + eps)
    CHECK(p[0] == doctest::Approx(1.0 - cfg.learning_rate * 0.5 / (0.5 + cfg.adam_eps)));
}

TEST_CASE("a non-finite loss aborts the run as diverged") {
    std::mt19937_64 rng(41);
    MlpModel model({3, {4}, 3});
    const Matrix x = random_batch(24, 3, rng);
    std::vector<int> y(24);
    for (std::size_t i = 0; i < 24; ++i) y[i] = static_cast<int>(i % 3);
    TrainConfig cfg;
    cfg.learning_rate = 1e160;  // parameters overflow, producing NaN logits
    cfg.epochs = 3;
    cfg.seed = 1;
    const TrainOutcome outcome = train(model, x, y, x, y, cfg);
    CHECK(outcome.diverged);
    CHECK(outcome.best_train_acc == 0.0);
    CHECK(outcome.best_val_acc == 0.0);
}

TEST_CASE("trace csv is written with one row per recorded epoch") {
    std::mt19937_64 rng(43);
    MlpModel model({3, {4}, 3});
    const Matrix x = random_batch(12, 3, rng);
    std::vector<int> y(12);
    for (std::size_t i = 0; i < 12; ++i) y[i] = static_cast<int>(i % 3);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.seed = 8;
    const TrainOutcome outcome = train(model, x, y, x, y, cfg);
    const auto path = std::filesystem::temp_directory_path() / "hqb_trace_test.csv";
    write_trace_csv(outcome, path.string());
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 4);  // header + epochs 0..2
    std::filesystem::remove(path);
}
