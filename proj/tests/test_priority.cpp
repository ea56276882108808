#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "discretion/discrepancy.hpp"
#include "discretion/priority.hpp"
#include "discretion/sim.hpp"

using namespace discretion;

namespace {

// Builds a supremacy matrix from explicit (win, support) pairs; {-1,-1}
// marks an undefined cell.
SupremacyMatrix matrix_from_counts(
    const std::vector<std::string>& ids,
    const std::vector<std::vector<std::pair<int, int>>>& grid) {
  std::vector<SupremacyCell> cells;
  for (const auto& r : grid) {
    for (const auto& [win, support] : r) {
      SupremacyCell c;
      if (support >= 0) {
        c.win_count = win;
        c.support = support;
      }
      cells.push_back(c);
    }
  }
  return SupremacyMatrix(ids, std::move(cells));
}

ConflictFrequencyMatrix uniform_freq(const std::vector<std::string>& ids,
                                     double f) {
  ConflictFrequencyMatrix out;
  out.principle_ids = ids;
  std::size_t n = ids.size();
  out.freq.assign(n, std::vector<double>(n, f));
  out.conflict_counts.assign(n, std::vector<std::int64_t>(n, 1));
  for (std::size_t i = 0; i < n; ++i) out.freq[i][i] = 0.0;
  out.total_items = 100;
  return out;
}

// Independent 1-D oracle: golden-section maximization of the two-principle
// objective over the weight gap.
double golden_section_gap(double ps, double lo = -20.0, double hi = 20.0) {
  auto g = [ps](double delta) {
    double s = 1.0 / (1.0 + std::exp(-delta));
    return ps * std::log(s) + (1.0 - ps) * std::log(1.0 - s);
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  while (b - a > 1e-12) {
    if (g(c) > g(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  return (a + b) / 2.0;
}

}  // namespace

TEST_CASE("partition: saturation and missing data classify as the "
          "definition demands") {
  std::vector<std::string> ids{"t", "f1", "f2", "n"};
  // t: one defined entry, all wins. f1/f2: mixed. n: never conflicts.
  auto sup = matrix_from_counts(
      ids, {
               {{0, 0}, {3, 3}, {-1, -1}, {-1, -1}},   // t beats f1 3/3
               {{0, 3}, {0, 0}, {6, 10}, {-1, -1}},    // f1: 0.0 vs t, 0.6 vs f2
               {{-1, -1}, {4, 10}, {0, 0}, {-1, -1}},  // f2: 0.4 vs f1
               {{-1, -1}, {-1, -1}, {-1, -1}, {0, 0}},
           });
  auto part = partition_principles(sup);
  CHECK(part.always_top == std::vector<std::string>{"t"});
  CHECK(part.fittable == std::vector<std::string>{"f1", "f2"});
  CHECK(part.no_data == std::vector<std::string>{"n"});
  CHECK(part.always_bottom.empty());
  CHECK(part.fittable.size() + part.always_top.size() +
            part.always_bottom.size() + part.no_data.size() ==
        ids.size());
}

TEST_CASE("partition: all-losses classify always_bottom, fittable needs "
          "both a win and a loss") {
  std::vector<std::string> ids{"b", "x"};
  auto sup = matrix_from_counts(ids, {
                                         {{0, 0}, {0, 5}},
                                         {{5, 5}, {0, 0}},
                                     });
  auto part = partition_principles(sup);
  CHECK(part.always_bottom == std::vector<std::string>{"b"});
  CHECK(part.always_top == std::vector<std::string>{"x"});
  CHECK(part.fittable.empty());

  // A principle with defined entries {1.0, 0.0} is still fittable.
  std::vector<std::string> ids3{"m", "y", "z"};
  auto sup3 = matrix_from_counts(ids3, {
                                           {{0, 0}, {4, 4}, {0, 4}},
                                           {{0, 4}, {0, 0}, {2, 4}},
                                           {{4, 4}, {2, 4}, {0, 0}},
                                       });
  auto part3 = partition_principles(sup3);
  CHECK(std::find(part3.fittable.begin(), part3.fittable.end(), "m") !=
        part3.fittable.end());
}

TEST_CASE("fit: balanced two-principle supremacy gives zero weights") {
  std::vector<std::string> ids{"p", "q"};
  auto sup = matrix_from_counts(ids, {
                                         {{0, 0}, {1, 2}},
                                         {{1, 2}, {0, 0}},
                                     });
  auto profile = fit_priorities(sup, uniform_freq(ids, 0.2), FitConfig{});
  REQUIRE(profile.weights.size() == 2);
  CHECK(profile.weights.at("p") == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(profile.weights.at("q") == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(profile.fit.converged);
}

TEST_CASE("fit: two principles recover the logit of the target exactly") {
  const double ps = sigmoid(1.0);
  std::vector<PairObservation> pairs = {{0, 1, ps, 0.3},
                                        {1, 0, 1.0 - ps, 0.3}};
  auto [w, meta] = fit_pairs(pairs, 2, FitConfig{});
  CHECK(meta.converged);
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(-0.5).epsilon(1e-6));

  // Cross-check against the independent golden-section oracle. Its argmax
  // resolution is bounded by objective flatness at the optimum (~sqrt eps).
  double oracle_gap = golden_section_gap(ps);
  CHECK(w[0] - w[1] == doctest::Approx(oracle_gap).epsilon(1e-6));
  CHECK(oracle_gap == doctest::Approx(logit(ps)).epsilon(1e-7));
}

TEST_CASE("fit: single pair matches logit(PS) across the open interval") {
  for (double ps : {0.05, 0.2, 0.5, 0.65, 0.9, 0.99}) {
    std::vector<PairObservation> pairs = {{0, 1, ps, 1.0},
                                          {1, 0, 1.0 - ps, 1.0}};
    auto [w, meta] = fit_pairs(pairs, 2, FitConfig{});
    CHECK(w[0] - w[1] == doctest::Approx(logit(ps)).epsilon(1e-6));
    CHECK(w[0] - w[1] ==
          doctest::Approx(golden_section_gap(ps)).epsilon(1e-6));
  }
}

TEST_CASE("objective is translation invariant; the mean-zero gauge pins "
          "the optimum") {
  std::mt19937_64 rng(31);
  std::vector<PairObservation> pairs;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      if (i != j)
        pairs.push_back({i, j,
                         0.1 + 0.8 * static_cast<double>(rng() % 1000) / 1000.0,
                         0.05 + static_cast<double>(rng() % 100) / 200.0});

  std::vector<double> w(5);
  for (auto& x : w) x = static_cast<double>(rng() % 2000) / 500.0 - 2.0;
  double base = pair_objective(w, pairs);
  for (double shift : {-3.0, 0.7, 12.5}) {
    auto shifted = w;
    for (auto& x : shifted) x += shift;
    CHECK(pair_objective(shifted, pairs) ==
          doctest::Approx(base).epsilon(1e-9));
  }

  auto [fitted, meta] = fit_pairs(pairs, 5, FitConfig{});
  double mean = 0.0;
  for (double x : fitted) mean += x;
  CHECK(std::abs(mean / 5.0) < 1e-9);
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(404);
  auto unit = [&rng]() {
    return static_cast<double>(rng() % 100000) / 100000.0;
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PairObservation> pairs;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j)
        if (i != j && unit() < 0.8)
          pairs.push_back({i, j, 0.02 + 0.96 * unit(), 0.01 + unit()});
    if (pairs.empty()) continue;

    std::vector<double> w(5);
    for (auto& x : w) x = 4.0 * unit() - 2.0;

    std::vector<double> grad(5);
    pair_gradient(w, pairs, grad);

    const double h = 1e-5;
    for (std::size_t k = 0; k < 5; ++k) {
      auto wp = w;
      auto wm = w;
      wp[k] += h;
      wm[k] -= h;
      double numeric =
          (pair_objective(wp, pairs) - pair_objective(wm, pairs)) / (2 * h);
      double scale = std::max({std::abs(grad[k]), std::abs(numeric), 1e-8});
      CHECK(std::abs(grad[k] - numeric) / scale < 1e-5);
    }
  }
}

TEST_CASE("fit is deterministic bit-for-bit") {
  std::vector<std::string> ids{"a", "b", "c"};
  auto sup = matrix_from_counts(ids, {
                                         {{0, 0}, {30, 40}, {25, 30}},
                                         {{10, 40}, {0, 0}, {18, 36}},
                                         {{5, 30}, {18, 36}, {0, 0}},
                                     });
  auto freq = uniform_freq(ids, 0.15);
  auto p1 = fit_priorities(sup, freq, FitConfig{});
  auto p2 = fit_priorities(sup, freq, FitConfig{});
  REQUIRE(p1.weights.size() == p2.weights.size());
  for (const auto& [id, w] : p1.weights) {
    double w2 = p2.weights.at(id);
    CHECK(std::memcmp(&w, &w2, sizeof(double)) == 0);
  }
}

TEST_CASE("fit: iteration starvation raises a convergence error with the "
          "last iterate") {
  std::vector<PairObservation> pairs = {{0, 1, 0.9, 1.0}, {1, 0, 0.1, 1.0}};
  FitConfig config;
  config.max_iterations = 1;
  try {
    fit_pairs(pairs, 2, config);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.gradient_norm > 0.0);
    CHECK(e.last_weights.size() == 2);
  }
}

TEST_CASE("fit: fewer than two fittable principles yields no weights") {
  std::vector<std::string> ids{"t", "b"};
  auto sup = matrix_from_counts(ids, {
                                         {{0, 0}, {5, 5}},
                                         {{0, 5}, {0, 0}},
                                     });
  auto profile = fit_priorities(sup, uniform_freq(ids, 0.1), FitConfig{});
  CHECK(profile.weights.empty());
  CHECK(profile.partition.always_top == std::vector<std::string>{"t"});
  CHECK(profile.partition.always_bottom == std::vector<std::string>{"b"});
}

TEST_CASE("fit: saturated targets inside the fittable set stay finite via "
          "the epsilon clamp") {
  // m wins all conflicts against y but loses some against z, so it stays
  // fittable while one of its targets is exactly 1.
  std::vector<std::string> ids{"m", "y", "z"};
  auto sup = matrix_from_counts(ids, {
                                         {{0, 0}, {4, 4}, {1, 4}},
                                         {{0, 4}, {0, 0}, {2, 4}},
                                         {{3, 4}, {2, 4}, {0, 0}},
                                     });
  auto profile = fit_priorities(sup, uniform_freq(ids, 0.2), FitConfig{});
  REQUIRE(profile.weights.size() == 3);
  for (const auto& [id, w] : profile.weights) CHECK(std::isfinite(w));
}

TEST_CASE("predicted supremacy follows the sigmoid and the infinite tiers") {
  std::vector<std::string> ids{"t1", "t2", "a", "b", "bot", "n"};
  PriorityProfile profile;
  profile.partition.always_top = {"t1", "t2"};
  profile.partition.always_bottom = {"bot"};
  profile.partition.no_data = {"n"};
  profile.partition.fittable = {"a", "b"};
  profile.weights["a"] = 0.5;
  profile.weights["b"] = -0.5;

  CHECK(*predicted_supremacy(profile, "a", "b") ==
        doctest::Approx(sigmoid(1.0)));
  CHECK(*predicted_supremacy(profile, "b", "a") ==
        doctest::Approx(1.0 - sigmoid(1.0)));

  PriorityProfile equal = profile;
  equal.weights["a"] = 0.0;
  equal.weights["b"] = 0.0;
  CHECK(*predicted_supremacy(equal, "a", "b") == doctest::Approx(0.5));

  CHECK(*predicted_supremacy(profile, "t1", "a") == 1.0);
  CHECK(*predicted_supremacy(profile, "a", "t1") == 0.0);
  CHECK(*predicted_supremacy(profile, "t1", "bot") == 1.0);
  CHECK(*predicted_supremacy(profile, "bot", "a") == 0.0);
  CHECK_FALSE(predicted_supremacy(profile, "t1", "t2").has_value());
  CHECK_FALSE(predicted_supremacy(profile, "n", "a").has_value());
  CHECK_THROWS_AS(predicted_supremacy(profile, "a", "a"), DataError);
  CHECK_THROWS_AS(predicted_supremacy(profile, "a", "unknown"), DataError);
}

TEST_CASE("three-principle recovery beats the lattice-search oracle") {
  SimulateConfig config;
  config.true_weights = {1.0, 0.0, -1.0};
  config.conflicts_per_pair = 2000;
  config.seed = 42;
  auto data = simulate_dataset(config);

  auto sup = supremacy_matrix(data.labels, data.judgments);
  auto freq = conflict_frequencies(data.judgments);
  auto profile = fit_priorities(sup, freq, FitConfig{});
  REQUIRE(profile.weights.size() == 3);

  // Ordering matches the truth.
  double w1 = profile.weights.at(data.principle_ids[0]);
  double w2 = profile.weights.at(data.principle_ids[1]);
  double w3 = profile.weights.at(data.principle_ids[2]);
  CHECK(w1 > w2);
  CHECK(w2 > w3);

  // Weights land near the (already mean-zero) truth.
  CHECK(w1 == doctest::Approx(1.0).epsilon(0.15));
  CHECK(std::abs(w2) < 0.15);
  CHECK(w3 == doctest::Approx(-1.0).epsilon(0.15));

  // Brute-force cross-check: no mean-zero lattice point beats the fit.
  std::vector<PairObservation> pairs;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      const auto& cell = sup.at(i, j);
      if (!cell.defined()) continue;
      pairs.push_back({i, j,
                       std::min(std::max(*cell.proportion(), 1e-6), 1.0 - 1e-6),
                       freq.freq[i][j]});
    }
  std::vector<double> fitted{w1, w2, w3};
  double fitted_obj = pair_objective(fitted, pairs);
  double best_lattice = -1e300;
  for (double a = -2.0; a <= 2.0 + 1e-9; a += 0.05) {
    for (double b = -2.0; b <= 2.0 + 1e-9; b += 0.05) {
      std::vector<double> w{a, b, -a - b};
      best_lattice = std::max(best_lattice, pair_objective(w, pairs));
    }
  }
  CHECK(fitted_obj >= best_lattice - 1e-9);
}

TEST_CASE("recovered ranking matches the truth on nearly all seeds") {
  // Gaps >= 0.5 and 2000 conflicts per pair: the ranking should be exact
  // in at least 19 of 20 trials.
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SimulateConfig config;
    config.true_weights = {0.75, 0.25, -0.25, -0.75};
    config.conflicts_per_pair = 2000;
    config.seed = seed;
    auto data = simulate_dataset(config);
    auto sup = supremacy_matrix(data.labels, data.judgments);
    auto freq = conflict_frequencies(data.judgments);
    auto profile = fit_priorities(sup, freq, FitConfig{});
    if (profile.weights.size() != 4) continue;

    std::vector<RankKey> truth;
    std::vector<RankKey> fitted;
    for (std::size_t i = 0; i < 4; ++i) {
      truth.push_back(RankKey::finite(config.true_weights[i]));
      fitted.push_back(
          RankKey::finite(profile.weights.at(data.principle_ids[i])));
    }
    auto score = kendall_tau_b_distance(truth, fitted);
    if (score.value.has_value() && *score.value == 0.0) ++exact;
  }
  CHECK(exact >= 19);
}
