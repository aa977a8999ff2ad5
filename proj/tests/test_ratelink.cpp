#include <doctest.h>

#include <cmath>

#include "resilib/ratelink.hpp"
#include "resilib/rng.hpp"

using namespace resilib;
using namespace resilib::ratelink;

TEST_CASE("bsc capacity anchors") {
  CHECK(bsc_capacity({0.0, 6035}) == doctest::Approx(6035.0));
  CHECK(bsc_capacity({0.5, 6035}) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(bsc_capacity({0.01, 6035}) - 5548.0) <= 1.0);
  CHECK(std::abs(bsc_capacity({0.1, 6035}) - 3205.0) <= 1.0);
  CHECK_THROWS(bsc_capacity({0.6, 6035}));
}

TEST_CASE("code table round trip and shape") {
  const auto table = default_code_table();
  CHECK(table.front().k == 1023);  // uncoded first
  CHECK(table.front().t_corr == 0);
  for (std::size_t i = 1; i < table.size(); ++i) {
    CHECK(table[i].k < table[i - 1].k);       // decreasing rate
    CHECK(table[i].t_corr > table[i - 1].t_corr);
  }
  write_code_table("test_code_table.csv", table);
  const auto back = read_code_table("test_code_table.csv");
  REQUIRE(back.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(back[i].k == table[i].k);
    CHECK(back[i].t_corr == table[i].t_corr);
  }
  std::remove("test_code_table.csv");
}

TEST_CASE("prefix code round trip") {
  Rng rng = Rng::seeded("ratelink-prefix", 1);
  std::vector<std::vector<int>> corpus;
  for (int i = 0; i < 50; ++i) {
    std::vector<int> stream;
    for (int j = 0; j < 100; ++j) {
      stream.push_back(static_cast<int>(rng.uniform_int(64) * rng.uniform_int(2)));
    }
    corpus.push_back(std::move(stream));
  }
  const PrefixCode code = PrefixCode::train(corpus);
  std::vector<int> message;
  for (int j = 0; j < 200; ++j) message.push_back(static_cast<int>(rng.uniform_int(64)));
  CHECK(code.decode(code.encode(message)) == message);
  // Skewed corpus compresses: frequent symbols get short codes.
  CHECK(code.lengths()[0] < code.lengths()[63]);
}

TEST_CASE("encoding is deterministic and pd is sparser than raw") {
  SourceConfig source;
  Rng rng = Rng::seeded("ratelink-corpus", 2);
  std::vector<std::vector<int>> symbol_corpus;
  std::vector<LabeledObject> objects;
  for (int i = 0; i < 60; ++i) {
    objects.push_back(sample_object(source, rng));
    // Raw symbols only; lengths are compared under one shared codebook.
    std::vector<int> symbols;
    for (Eigen::Index p = 0; p < objects.back().cloud.size(); ++p) {
      symbols.push_back(static_cast<int>(objects.back().cloud.points(p, 0) * 63));
      symbols.push_back(static_cast<int>(objects.back().cloud.points(p, 1) * 63));
    }
    symbol_corpus.push_back(std::move(symbols));
  }
  const PrefixCode code = PrefixCode::train(symbol_corpus);
  const LinkConfig raw_link{false, {1023, 1023, 0}};
  const LinkConfig pd_link{true, {1023, 1023, 0}};
  int shorter = 0;
  for (const auto& object : objects) {
    const auto raw_bits = encode_representation(object, raw_link, code, source);
    const auto pd_bits = encode_representation(object, pd_link, code, source);
    CHECK(encode_representation(object, raw_link, code, source) == raw_bits);  // deterministic
    if (pd_bits.size() < raw_bits.size()) ++shorter;
  }
  CHECK(shorter == static_cast<int>(objects.size()));  // sparsity premise, 100%
}

TEST_CASE("empty diagram encodes to the fixed header") {
  SourceConfig source;
  // A two-point cloud has no finite bars above the pruning threshold when the
  // points coincide.
  Eigen::MatrixXd pts(2, 2);
  pts << 0.5, 0.5, 0.5, 0.5;
  LabeledObject object{tda::PointCloud(pts), ObjectClass::Blob};
  const PrefixCode code = PrefixCode::train({{0, 1, 2}});
  const auto bits = encode_representation(object, {true, {1023, 1023, 0}}, code, source);
  CHECK(bits.size() == 16);  // header only
}

TEST_CASE("transmission boundary behavior") {
  Rng rng = Rng::seeded("ratelink-tx", 3);
  std::vector<bool> bits(2000, true);
  const ChannelModel clean{0.0, 6035};
  const CodeEntry code{1023, 500, 10};
  const TransmitResult ok = transmit(bits, clean, code, rng);
  for (bool flag : ok.codeword_ok) CHECK(flag);
  CHECK(ok.codeword_ok.size() == 4);  // ceil(2000/500)

  const ChannelModel ruinous{1.0, 6035};  // range extended in tests only
  const TransmitResult erased = transmit(bits, ruinous, code, rng);
  for (bool flag : erased.codeword_ok) CHECK_FALSE(flag);
  for (std::size_t b = 0; b < erased.received.size(); ++b) CHECK_FALSE(erased.received[b]);
}

TEST_CASE("codeword failure rate matches the binomial tail") {
  Rng rng = Rng::seeded("ratelink-binom", 4);
  const CodeEntry code{1023, 1013, 5};
  const ChannelModel channel{0.001, 6035};
  // Oracle: P[Binomial(1023, 0.001) > 5] by direct summation.
  double pmf = std::pow(0.999, 1023);
  double cdf = pmf;
  for (int k = 1; k <= 5; ++k) {
    pmf *= 0.001 / 0.999 * (1023.0 - k + 1) / k;
    cdf += pmf;
  }
  const double tail = 1.0 - cdf;
  int failures = 0;
  const int trials = 30000;
  std::vector<bool> word(static_cast<std::size_t>(code.k), true);
  for (int i = 0; i < trials; ++i) {
    if (!transmit(word, channel, code, rng).codeword_ok[0]) ++failures;
  }
  const double rate = failures / static_cast<double>(trials);
  const double ci = 3.0 * std::sqrt(tail * (1.0 - tail) / trials);
  CHECK(std::abs(rate - tail) < ci + 1e-4);
}

TEST_CASE("classifier separates the three shape classes on clean data") {
  SourceConfig source;
  Rng rng = Rng::seeded("ratelink-classifier", 5);
  std::vector<LabeledObject> corpus;
  for (int i = 0; i < 90; ++i) corpus.push_back(sample_object(source, rng));
  const Classifier classifier = train_classifier(corpus, source);
  int correct = 0;
  int total = 0;
  std::vector<std::vector<int>> symbol_corpus;
  for (const auto& object : corpus) {
    std::vector<int> symbols;
    for (Eigen::Index p = 0; p < object.cloud.size(); ++p) {
      symbols.push_back(static_cast<int>(object.cloud.points(p, 0) * 63));
    }
    symbol_corpus.push_back(std::move(symbols));
  }
  const PrefixCode code = PrefixCode::train(symbol_corpus);
  for (int i = 0; i < 60; ++i) {
    const LabeledObject object = sample_object(source, rng);
    const auto bits = encode_representation(object, {true, {1023, 1023, 0}}, code, source);
    const ObjectClass decision =
        classify_received(bits, true, code, classifier, source);
    correct += decision == object.label;
    ++total;
  }
  CHECK(static_cast<double>(correct) / total > 0.8);
}

TEST_CASE("feasible configs reproduce the paper's boundary cases") {
  const auto table = default_code_table();
  const FeasibilityInputs paper_lengths{6035.0, 200.0};
  std::vector<double> acc_raw(table.size(), 0.9);
  std::vector<double> acc_pd(table.size(), 0.85);

  // alpha = 0.01: the uncoded raw link fits the delay budget exactly.
  const auto feasible_low =
      feasible_configs({0.01, 6035}, 6035.0, 0.7, table, paper_lengths, acc_raw, acc_pd);
  bool found_uncoded_raw = false;
  for (const auto& cfg : feasible_low) {
    if (!cfg.send_diagram && cfg.code.t_corr == 0) found_uncoded_raw = true;
  }
  CHECK(found_uncoded_raw);

  // alpha = 0.1 with degraded raw accuracy: even rate-0.99 coding exceeds the
  // budget (6096 > 6035) and the uncoded row fails the accuracy floor, so no
  // raw configuration survives; diagram rows do.
  std::vector<double> acc_raw_bad(table.size(), 0.33);
  const auto feasible_high =
      feasible_configs({0.1, 6035}, 6035.0, 0.7, table, paper_lengths, acc_raw_bad, acc_pd);
  bool any_raw = false;
  bool any_pd = false;
  for (const auto& cfg : feasible_high) {
    any_raw |= !cfg.send_diagram;
    any_pd |= cfg.send_diagram;
  }
  CHECK_FALSE(any_raw);
  CHECK(any_pd);

  // Monotone in the accuracy floor: raising beta never adds configurations.
  const auto loose =
      feasible_configs({0.05, 6035}, 6035.0, 0.5, table, paper_lengths, acc_raw, acc_pd);
  const auto tight =
      feasible_configs({0.05, 6035}, 6035.0, 0.86, table, paper_lengths, acc_raw, acc_pd);
  CHECK(tight.size() <= loose.size());
  // beta = 0 and alpha = 0: everything within the delay budget is feasible.
  std::vector<double> acc_any(table.size(), 0.0);
  const auto all = feasible_configs({0.0, 6035}, 1e9, 0.0, table, paper_lengths, acc_any, acc_any);
  CHECK(all.size() == 2 * table.size());
}

TEST_CASE("ratelink use case: resilient recovers above the floor") {
  RatelinkConfig config;
  config.horizon = 700;
  config.ramp_start = 150;
  config.ramp_end = 250;
  const ResultSeries robust = run_ratelink(config, RatelinkDesign::Robust, 7);
  const ResultSeries resilient = run_ratelink(config, RatelinkDesign::Resilient, 7);

  // Clean phase: both high.
  CHECK(robust.mean_over("accuracy", 0, 140) > 0.8);
  CHECK(resilient.mean_over("accuracy", 0, 140) > 0.8);
  // Post-ramp: robust degraded, resilient back above the beta floor.
  CHECK(robust.mean_over("accuracy", 500, 699) < 0.55);
  CHECK(resilient.mean_over("accuracy", 500, 699) >= 0.7);
  // The resilient design switched to the diagram representation.
  CHECK(resilient.rows.back()[3] == 1.0);
  CHECK(robust.rows.back()[3] == 0.0);
}

TEST_CASE("constant clean channel keeps both designs flat") {
  RatelinkConfig config;
  config.horizon = 200;
  config.alpha_low = 0.0;
  config.alpha_high = 0.0;
  const ResultSeries robust = run_ratelink(config, RatelinkDesign::Robust, 8);
  const ResultSeries resilient = run_ratelink(config, RatelinkDesign::Resilient, 8);
  CHECK(robust.mean_over("accuracy", 20, 199) > 0.85);
  CHECK(resilient.mean_over("accuracy", 20, 199) > 0.85);
  for (const auto& row : resilient.rows) CHECK(row[4] == 1023.0);  // never reconfigures
}
