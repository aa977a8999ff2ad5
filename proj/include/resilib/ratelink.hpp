#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "resilib/series.hpp"
#include "resilib/tda.hpp"

namespace resilib {
class Rng;
}

namespace resilib::ratelink {

/// M uses of a binary symmetric channel with crossover probability alpha.
struct ChannelModel {
  double alpha = 0.01;
  long uses_per_slot = 6035;  // M
};

/// Capacity in bits per slot, M * (1 - H2(alpha)).
double bsc_capacity(const ChannelModel& channel);

/// Abstract t-error-correcting block code row.
struct CodeEntry {
  int n = 1023;
  int k = 1023;
  int t_corr = 0;
};

/// (1023, k, t) rows mirroring the standard table: k = 1023 - 10t up to
/// t = 57, extended at the deep-redundancy end with the use case's
/// configurations; the first row is the uncoded link.
std::vector<CodeEntry> default_code_table();
std::vector<CodeEntry> read_code_table(const std::string& path);
void write_code_table(const std::string& path, const std::vector<CodeEntry>& table);

enum class ObjectClass : int { Blob = 0, OneLoop = 1, TwoLoops = 2 };

struct SourceConfig {
  int points = 40;
  double noise = 0.025;
  double prune_ratio = 0.16;  // PD bars below this fraction of gamma_max are dropped
  double gamma_max = 0.75;
};

struct LabeledObject {
  tda::PointCloud cloud;
  ObjectClass label = ObjectClass::Blob;
};

/// Synthetic shape source: blobs (no loops), annuli (one loop), double
/// annuli (two loops), points in the unit square.
LabeledObject sample_object(const SourceConfig& config, Rng& rng);

/// Canonical prefix code over the 64 quantization symbols.
class PrefixCode {
public:
  static PrefixCode train(const std::vector<std::vector<int>>& symbol_corpus);
  [[nodiscard]] std::vector<bool> encode(const std::vector<int>& symbols) const;
  [[nodiscard]] std::vector<int> decode(const std::vector<bool>& bits) const;
  /// Decodes one symbol starting at `at`, advancing it; -1 when nothing
  /// matches the remaining bits.
  [[nodiscard]] int decode_one(const std::vector<bool>& bits, std::size_t& at) const;
  [[nodiscard]] const std::vector<int>& lengths() const { return lengths_; }

private:
  std::vector<int> lengths_;                  // per symbol
  std::vector<std::vector<bool>> codewords_;  // canonical
};

struct LinkConfig {
  bool send_diagram = false;  // x: raw point cloud (0) vs persistence diagram (1)
  CodeEntry code;
};

/// 16-bit count header plus 12 bits per raw point or 13 bits per diagram bar
/// (dim flag + two 6-bit coordinates), entropy coded with the prefix code.
std::vector<bool> encode_representation(const LabeledObject& object, const LinkConfig& config,
                                        const PrefixCode& code, const SourceConfig& source);

struct TransmitResult {
  std::vector<bool> received;       // data bits; erased codewords zeroed
  std::vector<bool> codeword_ok;    // per-codeword success flags
};

/// BSC transmission of whole codewords: a codeword survives iff its binomial
/// flip count is at most t_corr, otherwise it is erased (zeros).
TransmitResult transmit(const std::vector<bool>& bits, const ChannelModel& channel,
                        const CodeEntry& code, Rng& rng);

/// 8-dimensional topology features: top-2 H1 persistences, H1 count, H0
/// count, H0 death statistics and spreads, used by the fixed classifier.
Eigen::VectorXd diagram_features(const tda::PersistenceDiagram& diagram);

/// Nearest-centroid classifier over standardized diagram features; trained
/// once on a clean corpus and never retrained.
struct Classifier {
  Eigen::MatrixXd centroids;  // 3 x 8
  Eigen::VectorXd scale;      // per-feature std
  [[nodiscard]] ObjectClass classify(const Eigen::VectorXd& features) const;
};

Classifier train_classifier(const std::vector<LabeledObject>& corpus,
                            const SourceConfig& source);

/// Decode a received stream back to an object representation and classify it
/// (raw clouds are re-analyzed with the tda module; empty payloads fall back
/// to the blob class).
ObjectClass classify_received(const std::vector<bool>& bits, bool was_diagram,
                              const PrefixCode& code, const Classifier& classifier,
                              const SourceConfig& source);

struct FeasibilityInputs {
  double raw_mean_bits = 0.0;      // corpus-mean source bits, x = 0
  double diagram_mean_bits = 0.0;  // corpus-mean source bits, x = 1
};

/// All (x, k) rows satisfying the delay constraint
/// source_bits * n/k <= delay_budget, the rate constraint k/n <= C(alpha)/M,
/// and the accuracy floor A(x,k) >= beta. An empty result reports explicit
/// infeasibility; the caller picks a degraded fallback.
std::vector<LinkConfig> feasible_configs(const ChannelModel& channel, double delay_budget,
                                         double accuracy_floor,
                                         const std::vector<CodeEntry>& table,
                                         const FeasibilityInputs& lengths,
                                         const std::vector<double>& accuracy_raw,
                                         const std::vector<double>& accuracy_diagram);

struct RatelinkConfig {
  SourceConfig source;
  long channel_uses = 6035;      // M for the capacity story
  double delay_budget = 1024.0;  // corpus-scale delay constraint (bits per slot)
  double accuracy_floor = 0.7;   // beta
  int horizon = 1000;
  double alpha_low = 0.0002;
  double alpha_high = 0.1;
  int ramp_start = 250;
  int ramp_end = 400;
  int objects_per_step = 4;
  int detect_window = 20;
  int cooldown = 60;
  int accuracy_mc = 40;  // Monte-Carlo objects per accuracy-table entry
};

enum class RatelinkDesign { Robust, Resilient };

/// Robust design keeps the initial uncoded raw configuration; the resilient
/// design detects the accuracy drop, estimates the crossover from codeword
/// failure rates, switches to the diagram representation and walks down the
/// code table. Emits (t, accuracy, alpha, config_x, config_k).
ResultSeries run_ratelink(const RatelinkConfig& config, RatelinkDesign design,
                          std::uint64_t seed);

}  // namespace resilib::ratelink
