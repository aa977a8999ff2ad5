#include "resilib/ratelink.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "resilib/numerics.hpp"
#include "resilib/rng.hpp"

namespace resilib::ratelink {

double bsc_capacity(const ChannelModel& channel) {
  if (channel.alpha < 0.0 || channel.alpha > 0.5) {
    throw std::invalid_argument("bsc_capacity: alpha outside [0, 0.5]");
  }
  if (channel.uses_per_slot < 1) throw std::invalid_argument("bsc_capacity: M >= 1 required");
  return static_cast<double>(channel.uses_per_slot) * (1.0 - num::binary_entropy(channel.alpha));
}

std::vector<CodeEntry> default_code_table() {
  std::vector<CodeEntry> table;
  table.push_back({1023, 1023, 0});  // uncoded link
  for (int t = 1; t <= 57; ++t) table.push_back({1023, 1023 - 10 * t, t});
  // Deep-redundancy rows used by the reconfiguration walk; the parity/t trend
  // of the standard table extended past t = 57.
  table.push_back({1023, 323, 77});
  table.push_back({1023, 248, 103});
  table.push_back({1023, 183, 112});
  table.push_back({1023, 121, 120});
  return table;
}

std::vector<CodeEntry> read_code_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_code_table: cannot open " + path);
  std::vector<CodeEntry> table;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    CodeEntry entry;
    std::getline(ls, tok, ',');
    entry.n = std::stoi(tok);
    std::getline(ls, tok, ',');
    entry.k = std::stoi(tok);
    std::getline(ls, tok, ',');
    entry.t_corr = std::stoi(tok);
    if (entry.k < 1 || entry.k > entry.n) throw std::runtime_error("read_code_table: bad row");
    table.push_back(entry);
  }
  return table;
}

void write_code_table(const std::string& path, const std::vector<CodeEntry>& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_code_table: cannot open " + path);
  out << "n,k,t_corr\n";
  for (const auto& row : table) out << row.n << ',' << row.k << ',' << row.t_corr << '\n';
}

LabeledObject sample_object(const SourceConfig& config, Rng& rng) {
  const auto label = static_cast<ObjectClass>(rng.uniform_int(3));
  Eigen::MatrixXd points(config.points, 2);
  const auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  for (int i = 0; i < config.points; ++i) {
    double x = 0.5;
    double y = 0.5;
    switch (label) {
      case ObjectClass::Blob: {
        x = 0.5 + 0.10 * rng.normal();
        y = 0.5 + 0.10 * rng.normal();
        break;
      }
      case ObjectClass::OneLoop: {
        // Evenly spread angles with jitter keep the loop's birth scale small.
        const double angle = 2.0 * std::numbers::pi *
                             (static_cast<double>(i) + rng.uniform(-0.3, 0.3)) / config.points;
        x = 0.5 + 0.3 * std::cos(angle);
        y = 0.5 + 0.3 * std::sin(angle);
        break;
      }
      case ObjectClass::TwoLoops: {
        const int half = config.points / 2;
        const int j = i / 2;
        const double angle = 2.0 * std::numbers::pi *
                             (static_cast<double>(j) + rng.uniform(-0.3, 0.3)) / half;
        const double cx = i % 2 == 0 ? 0.27 : 0.73;
        x = cx + 0.19 * std::cos(angle);
        y = 0.5 + 0.19 * std::sin(angle);
        break;
      }
    }
    points(i, 0) = clamp01(x + config.noise * rng.normal());
    points(i, 1) = clamp01(y + config.noise * rng.normal());
  }
  return {tda::PointCloud(std::move(points)), label};
}

namespace {

constexpr int kSymbols = 64;
constexpr int kHeaderBits = 16;

int quantize(double v) { return std::clamp(static_cast<int>(v * kSymbols), 0, kSymbols - 1); }
double dequantize(int symbol) { return (symbol + 0.5) / kSymbols; }

// Pruned finite bars of the diagram, (dim, birth, death) triplets.
std::vector<std::array<double, 3>> pruned_bars(const tda::PersistenceDiagram& diagram,
                                               const SourceConfig& source) {
  std::vector<std::array<double, 3>> bars;
  const double min_persistence = source.prune_ratio * source.gamma_max;
  for (int dim = 0; dim <= 1; ++dim) {
    for (const auto& bar : diagram.dim(dim)) {
      if (std::isinf(bar.death)) continue;
      if (bar.death - bar.birth < min_persistence) continue;
      bars.push_back({static_cast<double>(dim), bar.birth, bar.death});
    }
  }
  return bars;
}

tda::PersistenceDiagram object_diagram(const tda::PointCloud& cloud,
                                       const SourceConfig& source) {
  return tda::persistence(tda::vr_filtration(cloud, source.gamma_max));
}

std::vector<int> object_symbols(const LabeledObject& object, bool diagram,
                                const SourceConfig& source) {
  std::vector<int> symbols;
  if (!diagram) {
    for (Eigen::Index i = 0; i < object.cloud.size(); ++i) {
      symbols.push_back(quantize(object.cloud.points(i, 0)));
      symbols.push_back(quantize(object.cloud.points(i, 1)));
    }
  } else {
    for (const auto& bar : pruned_bars(object_diagram(object.cloud, source), source)) {
      symbols.push_back(quantize(bar[1] / source.gamma_max));
      symbols.push_back(quantize(bar[2] / source.gamma_max));
    }
  }
  return symbols;
}

void push_uint(std::vector<bool>& bits, unsigned value, int width) {
  for (int b = width - 1; b >= 0; --b) bits.push_back(value >> b & 1u);
}

unsigned pop_uint(const std::vector<bool>& bits, std::size_t& at, int width) {
  unsigned value = 0;
  for (int b = 0; b < width && at < bits.size(); ++b) {
    value = value << 1 | static_cast<unsigned>(bits[at++]);
  }
  return value;
}

long binomial_draw(int n, double p, Rng& rng) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  // Exact inversion on the pmf recurrence.
  const double u = rng.uniform();
  double pmf = std::pow(1.0 - p, n);
  double cdf = pmf;
  long k = 0;
  while (cdf < u && k < n) {
    ++k;
    pmf *= p / (1.0 - p) * static_cast<double>(n - k + 1) / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

}  // namespace

PrefixCode PrefixCode::train(const std::vector<std::vector<int>>& symbol_corpus) {
  std::vector<long> freq(kSymbols, 1);  // add-one smoothing keeps every symbol codable
  for (const auto& stream : symbol_corpus) {
    for (int s : stream) {
      if (s < 0 || s >= kSymbols) throw std::invalid_argument("PrefixCode: symbol out of range");
      ++freq[static_cast<std::size_t>(s)];
    }
  }
  // Huffman lengths with deterministic tie-breaking on the smallest symbol.
  struct HuffNode {
    long freq;
    int tie;
    int index;
  };
  const auto cmp = [](const HuffNode& a, const HuffNode& b) {
    return std::tie(a.freq, a.tie) > std::tie(b.freq, b.tie);
  };
  std::priority_queue<HuffNode, std::vector<HuffNode>, decltype(cmp)> heap(cmp);
  std::vector<std::pair<int, int>> children;  // internal nodes
  std::vector<int> depth_of(kSymbols, 0);
  for (int s = 0; s < kSymbols; ++s) {
    heap.push({freq[static_cast<std::size_t>(s)], s, s});
  }
  int next_index = kSymbols;
  while (heap.size() > 1) {
    const HuffNode a = heap.top();
    heap.pop();
    const HuffNode b = heap.top();
    heap.pop();
    children.push_back({a.index, b.index});
    heap.push({a.freq + b.freq, std::min(a.tie, b.tie), next_index++});
  }
  // Depth-first from the root to assign leaf depths.
  std::vector<int> depths(static_cast<std::size_t>(next_index), 0);
  for (int node = next_index - 1; node >= kSymbols; --node) {
    const auto [l, r] = children[static_cast<std::size_t>(node - kSymbols)];
    depths[static_cast<std::size_t>(l)] = depths[static_cast<std::size_t>(node)] + 1;
    depths[static_cast<std::size_t>(r)] = depths[static_cast<std::size_t>(node)] + 1;
  }
  PrefixCode code;
  code.lengths_.assign(kSymbols, 0);
  for (int s = 0; s < kSymbols; ++s) code.lengths_[static_cast<std::size_t>(s)] = depths[static_cast<std::size_t>(s)];

  // Canonical codeword assignment: sort by (length, symbol).
  std::vector<int> order(kSymbols);
  for (int s = 0; s < kSymbols; ++s) order[static_cast<std::size_t>(s)] = s;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tie(code.lengths_[static_cast<std::size_t>(a)], a) <
           std::tie(code.lengths_[static_cast<std::size_t>(b)], b);
  });
  code.codewords_.assign(kSymbols, {});
  unsigned long value = 0;
  int previous_length = 0;
  for (int s : order) {
    const int len = code.lengths_[static_cast<std::size_t>(s)];
    value <<= len - previous_length;
    previous_length = len;
    std::vector<bool> bits(static_cast<std::size_t>(len));
    for (int b = 0; b < len; ++b) {
      bits[static_cast<std::size_t>(b)] = value >> (len - 1 - b) & 1u;
    }
    code.codewords_[static_cast<std::size_t>(s)] = std::move(bits);
    ++value;
  }
  return code;
}

std::vector<bool> PrefixCode::encode(const std::vector<int>& symbols) const {
  std::vector<bool> bits;
  for (int s : symbols) {
    const auto& w = codewords_.at(static_cast<std::size_t>(s));
    bits.insert(bits.end(), w.begin(), w.end());
  }
  return bits;
}

int PrefixCode::decode_one(const std::vector<bool>& bits, std::size_t& at) const {
  for (int s = 0; s < kSymbols; ++s) {
    const auto& w = codewords_[static_cast<std::size_t>(s)];
    if (w.empty() || at + w.size() > bits.size()) continue;
    if (std::equal(w.begin(), w.end(), bits.begin() + static_cast<long>(at))) {
      at += w.size();
      return s;
    }
  }
  return -1;
}

std::vector<int> PrefixCode::decode(const std::vector<bool>& bits) const {
  std::vector<int> symbols;
  std::size_t at = 0;
  while (at < bits.size()) {
    const int s = decode_one(bits, at);
    if (s < 0) break;  // trailing padding or corrupted suffix
    symbols.push_back(s);
  }
  return symbols;
}

std::vector<bool> encode_representation(const LabeledObject& object, const LinkConfig& config,
                                        const PrefixCode& code, const SourceConfig& source) {
  std::vector<bool> bits;
  if (!config.send_diagram) {
    const std::vector<int> symbols = object_symbols(object, false, source);
    push_uint(bits, static_cast<unsigned>(symbols.size() / 2), kHeaderBits);
    const std::vector<bool> payload = code.encode(symbols);
    bits.insert(bits.end(), payload.begin(), payload.end());
  } else {
    const auto bars = pruned_bars(object_diagram(object.cloud, source), source);
    push_uint(bits, static_cast<unsigned>(bars.size()), kHeaderBits);
    for (const auto& bar : bars) {
      bits.push_back(bar[0] != 0.0);  // dimension flag
      for (int coord = 1; coord <= 2; ++coord) {
        const auto w = code.encode({quantize(bar[static_cast<std::size_t>(coord)] /
                                             source.gamma_max)});
        bits.insert(bits.end(), w.begin(), w.end());
      }
    }
  }
  return bits;
}

TransmitResult transmit(const std::vector<bool>& bits, const ChannelModel& channel,
                        const CodeEntry& code, Rng& rng) {
  if (channel.alpha < 0.0 || channel.alpha > 1.0) {
    throw std::invalid_argument("transmit: alpha outside [0,1]");
  }
  if (code.k < 1 || code.k > code.n) throw std::invalid_argument("transmit: bad code entry");
  TransmitResult result;
  const std::size_t words = (bits.size() + static_cast<std::size_t>(code.k) - 1) /
                            static_cast<std::size_t>(code.k);
  result.received.assign(words * static_cast<std::size_t>(code.k), false);
  for (std::size_t w = 0; w < words; ++w) {
    const long flips = binomial_draw(code.n, channel.alpha, rng);
    const bool ok = flips <= code.t_corr;
    result.codeword_ok.push_back(ok);
    if (ok) {
      const std::size_t begin = w * static_cast<std::size_t>(code.k);
      for (std::size_t b = 0; b < static_cast<std::size_t>(code.k) && begin + b < bits.size();
           ++b) {
        result.received[begin + b] = bits[begin + b];
      }
    }
    // Erased codewords stay zeroed (graceful degradation).
  }
  return result;
}

Eigen::VectorXd diagram_features(const tda::PersistenceDiagram& diagram) {
  std::vector<double> h1_pers;
  double h1_birth_sum = 0.0;
  for (const auto& bar : diagram.h1) {
    if (std::isinf(bar.death)) continue;
    h1_pers.push_back(bar.death - bar.birth);
    h1_birth_sum += bar.birth;
  }
  std::sort(h1_pers.rbegin(), h1_pers.rend());
  std::vector<double> h0_deaths;
  for (const auto& bar : diagram.h0) {
    if (!std::isinf(bar.death)) h0_deaths.push_back(bar.death);
  }
  double mean = 0.0;
  double mx = 0.0;
  for (double d : h0_deaths) {
    mean += d;
    mx = std::max(mx, d);
  }
  if (!h0_deaths.empty()) mean /= static_cast<double>(h0_deaths.size());
  double var = 0.0;
  for (double d : h0_deaths) var += (d - mean) * (d - mean);
  if (!h0_deaths.empty()) var /= static_cast<double>(h0_deaths.size());

  Eigen::VectorXd f(8);
  f << (h1_pers.size() > 0 ? h1_pers[0] : 0.0), (h1_pers.size() > 1 ? h1_pers[1] : 0.0),
      static_cast<double>(h1_pers.size()), static_cast<double>(h0_deaths.size()), mean, mx,
      std::sqrt(var), (h1_pers.empty() ? 0.0 : h1_birth_sum / static_cast<double>(h1_pers.size()));
  return f;
}

ObjectClass Classifier::classify(const Eigen::VectorXd& features) const {
  Eigen::Index best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double dist =
        ((features - centroids.row(c).transpose()).cwiseQuotient(scale)).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  return static_cast<ObjectClass>(best);
}

Classifier train_classifier(const std::vector<LabeledObject>& corpus,
                            const SourceConfig& source) {
  if (corpus.size() < 6) throw std::invalid_argument("train_classifier: corpus too small");
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(3, 8);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(3);
  std::vector<Eigen::VectorXd> all_features;
  for (const auto& object : corpus) {
    tda::PersistenceDiagram diagram = object_diagram(object.cloud, source);
    // Features from the pruned diagram, matching what the receiver sees.
    tda::PersistenceDiagram pruned;
    for (const auto& bar : pruned_bars(diagram, source)) {
      (bar[0] == 0.0 ? pruned.h0 : pruned.h1).push_back({bar[1], bar[2]});
    }
    const Eigen::VectorXd f = diagram_features(pruned);
    sums.row(static_cast<int>(object.label)) += f.transpose();
    counts[static_cast<int>(object.label)] += 1.0;
    all_features.push_back(f);
  }
  Classifier classifier;
  classifier.centroids = sums.array().colwise() / counts.array();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(8);
  for (const auto& f : all_features) mean += f;
  mean /= static_cast<double>(all_features.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(8);
  for (const auto& f : all_features) var += (f - mean).cwiseAbs2();
  var /= static_cast<double>(all_features.size());
  classifier.scale = var.cwiseSqrt().cwiseMax(1e-6);
  return classifier;
}

ObjectClass classify_received(const std::vector<bool>& bits, bool was_diagram,
                              const PrefixCode& code, const Classifier& classifier,
                              const SourceConfig& source) {
  std::size_t at = 0;
  const unsigned count = pop_uint(bits, at, kHeaderBits);

  tda::PersistenceDiagram diagram;
  if (was_diagram) {
    for (unsigned i = 0; i < count && at < bits.size(); ++i) {
      const bool is_loop = bits[at++];
      const int birth_sym = code.decode_one(bits, at);
      const int death_sym = code.decode_one(bits, at);
      if (birth_sym < 0 || death_sym < 0) break;
      const double birth = dequantize(birth_sym) * source.gamma_max;
      const double death = dequantize(death_sym) * source.gamma_max;
      if (death <= birth) continue;
      (is_loop ? diagram.h1 : diagram.h0).push_back({birth, death});
    }
  } else {
    std::vector<bool> payload(bits.begin() + static_cast<long>(at), bits.end());
    std::vector<int> symbols = code.decode(payload);
    const std::size_t pairs = std::min<std::size_t>(count, symbols.size() / 2);
    if (pairs >= 2) {
      Eigen::MatrixXd points(static_cast<Eigen::Index>(pairs), 2);
      for (std::size_t i = 0; i < pairs; ++i) {
        points(static_cast<Eigen::Index>(i), 0) = dequantize(symbols[2 * i]);
        points(static_cast<Eigen::Index>(i), 1) = dequantize(symbols[2 * i + 1]);
      }
      tda::PersistenceDiagram full = object_diagram(tda::PointCloud(std::move(points)), source);
      for (const auto& bar : pruned_bars(full, source)) {
        (bar[0] == 0.0 ? diagram.h0 : diagram.h1).push_back({bar[1], bar[2]});
      }
    }
  }
  return classifier.classify(diagram_features(diagram));
}

std::vector<LinkConfig> feasible_configs(const ChannelModel& channel, double delay_budget,
                                         double accuracy_floor,
                                         const std::vector<CodeEntry>& table,
                                         const FeasibilityInputs& lengths,
                                         const std::vector<double>& accuracy_raw,
                                         const std::vector<double>& accuracy_diagram) {
  if (accuracy_raw.size() != table.size() || accuracy_diagram.size() != table.size()) {
    throw std::invalid_argument("feasible_configs: one accuracy entry per table row required");
  }
  const double rate_cap = 1.0 - num::binary_entropy(channel.alpha);
  std::vector<LinkConfig> feasible;
  for (std::size_t row = 0; row < table.size(); ++row) {
    const CodeEntry& entry = table[row];
    const double expansion = static_cast<double>(entry.n) / static_cast<double>(entry.k);
    // The rate constraint governs coded links; the uncoded row has no code
    // rate to compare against capacity and is screened by the accuracy floor.
    const bool rate_ok =
        entry.t_corr == 0 ||
        static_cast<double>(entry.k) / static_cast<double>(entry.n) <= rate_cap;
    if (lengths.raw_mean_bits * expansion <= delay_budget && rate_ok &&
        accuracy_raw[row] >= accuracy_floor) {
      feasible.push_back({false, entry});
    }
    if (lengths.diagram_mean_bits * expansion <= delay_budget && rate_ok &&
        accuracy_diagram[row] >= accuracy_floor) {
      feasible.push_back({true, entry});
    }
  }
  return feasible;
}

namespace {

double estimate_alpha(int n, int t_corr, double failure_rate) {
  // Inverts P(Binom(n, alpha) > t) = failure_rate by bisection.
  const auto tail = [&](double alpha) {
    double pmf = std::pow(1.0 - alpha, n);
    double cdf = pmf;
    for (int k = 1; k <= t_corr; ++k) {
      pmf *= alpha / (1.0 - alpha) * static_cast<double>(n - k + 1) / static_cast<double>(k);
      cdf += pmf;
    }
    return 1.0 - cdf;
  };
  double lo = 1e-6;
  double hi = 0.49;
  if (failure_rate <= tail(lo)) return lo;
  if (failure_rate >= tail(hi)) return hi;
  for (int i = 0; i < 80; ++i) {
    const double mid = (lo + hi) / 2.0;
    if (tail(mid) < failure_rate) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2.0;
}

}  // namespace

ResultSeries run_ratelink(const RatelinkConfig& config, RatelinkDesign design,
                          std::uint64_t seed) {
  Rng root = Rng::seeded("ratelink", seed);
  Rng corpus_rng = root.stream("corpus");
  Rng object_rng = root.stream("objects");
  Rng channel_rng = root.stream("channel");

  // Fixed training corpus: codebook and classifier are built once.
  std::vector<LabeledObject> corpus;
  std::vector<std::vector<int>> symbol_corpus;
  double raw_bits_sum = 0.0;
  double diagram_bits_sum = 0.0;
  for (int i = 0; i < 120; ++i) {
    corpus.push_back(sample_object(config.source, corpus_rng));
    symbol_corpus.push_back(object_symbols(corpus.back(), false, config.source));
    symbol_corpus.push_back(object_symbols(corpus.back(), true, config.source));
  }
  const PrefixCode prefix = PrefixCode::train(symbol_corpus);
  const Classifier classifier = train_classifier(corpus, config.source);
  for (const auto& object : corpus) {
    raw_bits_sum += static_cast<double>(
        encode_representation(object, {false, {1023, 1023, 0}}, prefix, config.source).size());
    diagram_bits_sum += static_cast<double>(
        encode_representation(object, {true, {1023, 1023, 0}}, prefix, config.source).size());
  }

  const std::vector<CodeEntry> table = default_code_table();
  LinkConfig link{false, table.front()};  // (x, k) = (0, uncoded)
  const bool resilient = design == RatelinkDesign::Resilient;

  std::deque<double> trailing_acc;
  std::deque<bool> recent_words;  // rolling codeword success flags
  int cooldown_until = 0;
  std::size_t table_row = 0;

  const double rate_cap_budget = config.delay_budget;

  ResultSeries series({"t", "accuracy", "alpha", "config_x", "config_k"});
  for (int t = 0; t < config.horizon; ++t) {
    double alpha = config.alpha_low;
    if (t >= config.ramp_end) {
      alpha = config.alpha_high;
    } else if (t >= config.ramp_start) {
      const double frac = static_cast<double>(t - config.ramp_start) /
                          static_cast<double>(config.ramp_end - config.ramp_start);
      alpha = config.alpha_low + frac * (config.alpha_high - config.alpha_low);
    }
    const ChannelModel channel{alpha, config.channel_uses};

    int correct = 0;
    for (int i = 0; i < config.objects_per_step; ++i) {
      const LabeledObject object = sample_object(config.source, object_rng);
      const std::vector<bool> bits =
          encode_representation(object, link, prefix, config.source);
      const TransmitResult tx = transmit(bits, channel, link.code, channel_rng);
      for (bool ok : tx.codeword_ok) {
        recent_words.push_back(ok);
        if (recent_words.size() > 120) recent_words.pop_front();
      }
      const ObjectClass decision = classify_received(tx.received, link.send_diagram, prefix,
                                                     classifier, config.source);
      if (decision == object.label) ++correct;
    }
    const double accuracy = static_cast<double>(correct) / config.objects_per_step;
    trailing_acc.push_back(accuracy);
    if (static_cast<int>(trailing_acc.size()) > config.detect_window) trailing_acc.pop_front();

    if (resilient && t >= cooldown_until &&
        static_cast<int>(trailing_acc.size()) == config.detect_window) {
      double mean_acc = 0.0;
      for (double a : trailing_acc) mean_acc += a;
      mean_acc /= static_cast<double>(trailing_acc.size());
      if (mean_acc < config.accuracy_floor && recent_words.size() >= 40) {
        long failures = 0;
        for (bool ok : recent_words) failures += ok ? 0 : 1;
        const double failure_rate =
            static_cast<double>(failures) / static_cast<double>(recent_words.size());
        const double alpha_hat =
            estimate_alpha(link.code.n, link.code.t_corr, failure_rate);
        const double rate_cap =
            1.0 - num::binary_entropy(std::min(alpha_hat, 0.4999));
        const auto success_at = [&](const CodeEntry& entry) {
          double pmf = std::pow(1.0 - alpha_hat, entry.n);
          double cdf = pmf;
          for (int k = 1; k <= entry.t_corr; ++k) {
            pmf *= alpha_hat / (1.0 - alpha_hat) *
                   static_cast<double>(entry.n - k + 1) / static_cast<double>(k);
            cdf += pmf;
          }
          return cdf;
        };
        if (!link.send_diagram) {
          // Switch to the diagram representation at the largest code rate the
          // estimated channel supports: delay and Shannon-rate constraints
          // plus a modelled even-odds decoding success. When the estimate is
          // saturated nothing qualifies and the deepest row is the degraded
          // fallback; later triggers walk further down anyway.
          const double mean_bits = diagram_bits_sum / static_cast<double>(corpus.size());
          std::size_t chosen = table.size() - 1;  // degraded fallback
          for (std::size_t row = 1; row < table.size(); ++row) {
            const CodeEntry& entry = table[row];
            const double expansion =
                static_cast<double>(entry.n) / static_cast<double>(entry.k);
            if (static_cast<double>(entry.k) / entry.n <= rate_cap &&
                mean_bits * expansion <= rate_cap_budget && success_at(entry) >= 0.5) {
              chosen = row;
              break;  // table is sorted by decreasing k
            }
          }
          table_row = chosen;
          link = {true, table[table_row]};
        } else {
          // Still starving: re-select with the refreshed estimate, moving at
          // least one row deeper into the redundancy table.
          std::size_t chosen = table.size() - 1;
          const double mean_bits = diagram_bits_sum / static_cast<double>(corpus.size());
          for (std::size_t row = table_row + 1; row < table.size(); ++row) {
            const CodeEntry& entry = table[row];
            const double expansion =
                static_cast<double>(entry.n) / static_cast<double>(entry.k);
            if (static_cast<double>(entry.k) / entry.n <= rate_cap &&
                mean_bits * expansion <= rate_cap_budget && success_at(entry) >= 0.5) {
              chosen = row;
              break;
            }
          }
          table_row = std::max(chosen, table_row + 1);
          if (table_row >= table.size()) table_row = table.size() - 1;
          link.code = table[table_row];
        }
        recent_words.clear();
        trailing_acc.clear();
        cooldown_until = t + config.cooldown;
      }
    }

    series.add_row({static_cast<double>(t), accuracy, alpha, link.send_diagram ? 1.0 : 0.0,
                    static_cast<double>(link.code.k)});
  }
  return series;
}

}  // namespace resilib::ratelink
