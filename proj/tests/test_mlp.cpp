#include <doctest.h>

#include <cmath>

#include "bsbench/gbdt.hpp"
#include "bsbench/metrics.hpp"
#include "bsbench/mlp.hpp"
#include "bsbench/rng.hpp"

using namespace bsb;

TEST_SUITE_BEGIN("mlp");

namespace {

const std::vector<std::string> kTwo = {"neg", "pos"};

// two well-separated gaussian blobs
void make_blobs(std::size_t n, Matrix& X, std::vector<int>& y,
                std::uint64_t seed) {
  Rng rng(seed);
  X = Matrix(n, 2);
  y.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = rng.uniform_int(0, 1);
    const double cx = cls == 0 ? -2.0 : 2.0;
    X(i, 0) = cx + rng.normal();
    X(i, 1) = cx + rng.normal();
    y[i] = cls;
  }
  y[0] = 0;
  y[1] = 1;
}

MlpConfig small_cfg() {
  MlpConfig cfg;
  cfg.hidden = {16, 8};
  cfg.epochs = 30;
  cfg.learning_rate = 3e-3;
  cfg.batch_size = 16;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("separable blobs train to a high AUC with falling loss") {
  Matrix X;
  std::vector<int> y;
  make_blobs(300, X, y, 301);
  TrainReport report;
  const MlpModel model = train_mlp(X, y, kTwo, small_cfg(), &report);
  REQUIRE(report.train_loss.size() == 30);
  CHECK(report.train_loss.back() < report.train_loss.front());

  const Matrix p = predict_mlp(model, X);
  std::vector<double> scores(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) scores[i] = p(i, 1);
  CHECK(roc_auc_binary(scores, y) > 0.99);
}

TEST_CASE("probability rows sum to one") {
  Matrix X;
  std::vector<int> y;
  make_blobs(64, X, y, 302);
  MlpConfig cfg = small_cfg();
  cfg.epochs = 3;
  const MlpModel model = train_mlp(X, y, kTwo, cfg);
  const Matrix p = predict_mlp(model, X);
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < p.cols(); ++c) {
      CHECK(p(i, c) >= 0.0);
      sum += p(i, c);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("config invariants") {
  MlpConfig cfg = small_cfg();
  Matrix X;
  std::vector<int> y;
  make_blobs(20, X, y, 303);

  SUBCASE("zero epochs rejected") {
    cfg.epochs = 0;
    CHECK_THROWS_AS(train_mlp(X, y, kTwo, cfg), ConfigError);
  }
  SUBCASE("no hidden layers rejected") {
    cfg.hidden.clear();
    CHECK_THROWS_AS(train_mlp(X, y, kTwo, cfg), ConfigError);
  }
  SUBCASE("single-class data rejected") {
    std::vector<int> ones(y.size(), 1);
    CHECK_THROWS_AS(train_mlp(X, ones, kTwo, cfg), DegenerateDataError);
  }
}

TEST_CASE("same seed reproduces weights bitwise, different seed does not") {
  Matrix X;
  std::vector<int> y;
  make_blobs(100, X, y, 304);
  MlpConfig cfg = small_cfg();
  cfg.epochs = 5;
  const MlpModel a = train_mlp(X, y, kTwo, cfg);
  const MlpModel b = train_mlp(X, y, kTwo, cfg);
  CHECK(mlp_to_json(a) == mlp_to_json(b));

  cfg.seed = 100;
  const MlpModel c = train_mlp(X, y, kTwo, cfg);
  CHECK(mlp_to_json(c) != mlp_to_json(a));
}

TEST_CASE("gradient check against central finite differences") {
  Matrix X;
  std::vector<int> y;
  make_blobs(24, X, y, 305);
  MlpConfig cfg = small_cfg();

  SUBCASE("freshly initialized model") {
    const MlpModel model = init_mlp(2, kTwo, cfg);
    CHECK(grad_check(model, X, y, 1) <= 1e-4);
  }
  SUBCASE("all-zero input batch with nonzero labels") {
    const MlpModel model = init_mlp(2, kTwo, cfg);
    Matrix zeros(16, 2, 0.0);
    std::vector<int> labels(16, 1);
    labels[3] = 0;
    CHECK(grad_check(model, zeros, labels, 2) <= 1e-4);
  }
  SUBCASE("briefly trained model") {
    MlpConfig short_cfg = cfg;
    short_cfg.epochs = 2;
    const MlpModel model = train_mlp(X, y, kTwo, short_cfg);
    CHECK(grad_check(model, X, y, 3) <= 1e-4);
  }
}

TEST_CASE("duplicated batches keep the mean-reduced gradient") {
  Matrix X;
  std::vector<int> y;
  make_blobs(8, X, y, 306);
  const MlpModel model = init_mlp(2, kTwo, small_cfg());

  Matrix one(1, 2);
  one(0, 0) = X(0, 0);
  one(0, 1) = X(0, 1);
  const std::vector<int> y_one = {y[0]};

  Matrix dup(4, 2);
  for (std::size_t r = 0; r < 4; ++r) {
    dup(r, 0) = X(0, 0);
    dup(r, 1) = X(0, 1);
  }
  const std::vector<int> y_dup(4, y[0]);

  const std::vector<double> g1 = mlp_gradients(model, one, y_one);
  const std::vector<double> g4 = mlp_gradients(model, dup, y_dup);
  REQUIRE(g1.size() == g4.size());
  for (std::size_t i = 0; i < g1.size(); ++i)
    CHECK(g4[i] == doctest::Approx(g1[i]).epsilon(1e-12));
}

TEST_CASE("validation checkpointing restores the best epoch") {
  Matrix X;
  std::vector<int> y;
  make_blobs(200, X, y, 307);
  Matrix X_val;
  std::vector<int> y_val;
  make_blobs(60, X_val, y_val, 308);

  MlpConfig cfg = small_cfg();
  cfg.epochs = 12;
  TrainReport report;
  const MlpModel model =
      train_mlp(X, y, kTwo, cfg, &report, &X_val, &y_val);
  REQUIRE(report.val_loss.size() == 12);
  REQUIRE(report.best_epoch >= 0);
  // reported best epoch is the argmin of the recorded validation losses
  double best = report.val_loss[static_cast<std::size_t>(report.best_epoch)];
  for (double vl : report.val_loss) CHECK(best <= vl + 1e-15);
  // the restored model reproduces that loss
  CHECK(mlp_loss(model, X_val, y_val) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("permuting class indices permutes probability columns") {
  Rng rng(309);
  const std::size_t n = 120;
  Matrix X(n, 3);
  std::vector<int> y(n), y_perm(n);
  const int perm[3] = {1, 2, 0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < 3; ++f) X(i, f) = rng.uniform(-1.0, 1.0);
    y[i] = rng.uniform_int(0, 2);
    y_perm[i] = perm[y[i]];
  }
  y[0] = 0;
  y[1] = 1;
  y[2] = 2;
  y_perm[0] = perm[0];
  y_perm[1] = perm[1];
  y_perm[2] = perm[2];

  MlpConfig cfg = small_cfg();
  cfg.epochs = 6;
  const std::vector<std::string> names = {"a", "b", "c"};
  const MlpModel base = train_mlp(X, y, names, cfg);
  const MlpModel permuted = train_mlp(X, y_perm, names, cfg);
  const Matrix p = predict_mlp(base, X);
  const Matrix q = predict_mlp(permuted, X);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(q(i, static_cast<std::size_t>(perm[c])) ==
            doctest::Approx(p(i, c)).epsilon(1e-6));
}

TEST_CASE("standardization comes from the training rows only") {
  Matrix X;
  std::vector<int> y;
  make_blobs(100, X, y, 310);
  MlpConfig cfg = small_cfg();
  cfg.epochs = 2;
  const MlpModel model = train_mlp(X, y, kTwo, cfg);

  double mean0 = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) mean0 += X(i, 0);
  mean0 /= static_cast<double>(X.rows());
  CHECK(model.feat_mean[0] == doctest::Approx(mean0).epsilon(1e-12));
  CHECK(model.feat_std[0] > 0.0);
}

TEST_CASE("model JSON round-trips predictions exactly") {
  Matrix X;
  std::vector<int> y;
  make_blobs(40, X, y, 311);
  MlpConfig cfg = small_cfg();
  cfg.epochs = 3;
  const MlpModel model = train_mlp(X, y, kTwo, cfg);
  const MlpModel back = mlp_from_json(mlp_to_json(model));
  const Matrix p1 = predict_mlp(model, X);
  const Matrix p2 = predict_mlp(back, X);
  for (std::size_t i = 0; i < p1.data().size(); ++i)
    CHECK(p1.data()[i] == p2.data()[i]);
}

TEST_SUITE_END();
