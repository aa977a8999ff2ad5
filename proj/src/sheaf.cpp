#include "resilib/sheaf.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "resilib/rng.hpp"

namespace resilib::sheaf {

SheafGraph::SheafGraph(Graph g, std::vector<int> dims, int edge_dim)
    : base(std::move(g)), vertex_dims(std::move(dims)) {
  if (static_cast<int>(vertex_dims.size()) != base.node_count()) {
    throw std::invalid_argument("SheafGraph: one stalk dimension per vertex required");
  }
  for (int d : vertex_dims) {
    if (d < 1) throw std::invalid_argument("SheafGraph: stalk dimensions must be positive");
  }
  if (edge_dim < 1) throw std::invalid_argument("SheafGraph: edge dimension must be positive");
  for (auto [u, v] : base.edges()) {
    EdgeMaps maps;
    maps.u = u;
    maps.v = v;
    maps.from_u = Eigen::MatrixXd::Identity(edge_dim, vertex_dims[static_cast<std::size_t>(u)]);
    maps.from_v = Eigen::MatrixXd::Identity(edge_dim, vertex_dims[static_cast<std::size_t>(v)]);
    edges.push_back(std::move(maps));
  }
}

SheafGraph SheafGraph::constant(const Graph& g, int dim) {
  return SheafGraph(g, std::vector<int>(static_cast<std::size_t>(g.node_count()), dim), dim);
}

namespace {

Eigen::MatrixXd orthonormal_rows(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(cols, rows);  // QR gives orthonormal columns; transpose after
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols, rows);
  return q.transpose();
}

}  // namespace

SheafGraph SheafGraph::random(const Graph& g, std::vector<int> dims, int edge_dim, Rng& rng) {
  SheafGraph sheaf(g, std::move(dims), edge_dim);
  for (auto& e : sheaf.edges) {
    e.from_u = orthonormal_rows(edge_dim, sheaf.vertex_dims[static_cast<std::size_t>(e.u)], rng);
    e.from_v = orthonormal_rows(edge_dim, sheaf.vertex_dims[static_cast<std::size_t>(e.v)], rng);
  }
  return sheaf;
}

std::string SheafGraph::to_json() const {
  nlohmann::json j;
  j["nodes"] = base.node_count();
  j["vertex_dims"] = vertex_dims;
  nlohmann::json edge_list = nlohmann::json::array();
  for (const auto& e : edges) {
    nlohmann::json je;
    je["u"] = e.u;
    je["v"] = e.v;
    const auto dump = [](const Eigen::MatrixXd& m) {
      std::vector<std::vector<double>> rows;
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row;
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
      }
      return rows;
    };
    je["from_u"] = dump(e.from_u);
    je["from_v"] = dump(e.from_v);
    edge_list.push_back(std::move(je));
  }
  j["edges"] = std::move(edge_list);
  return j.dump();
}

SheafGraph SheafGraph::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const int nodes = j.at("nodes").get<int>();
  Graph g(nodes);
  const auto parse = [](const nlohmann::json& rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.at(0).size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index k = 0; k < c; ++k) {
        m(i, k) = rows.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
      }
    }
    return m;
  };
  std::vector<SheafGraph::EdgeMaps> maps;
  for (const auto& je : j.at("edges")) {
    g.add_edge(je.at("u").get<int>(), je.at("v").get<int>());
    maps.push_back({je.at("u").get<int>(), je.at("v").get<int>(), parse(je.at("from_u")),
                    parse(je.at("from_v"))});
  }
  const auto dims = j.at("vertex_dims").get<std::vector<int>>();
  const int edge_dim = maps.empty() ? 1 : static_cast<int>(maps.front().from_u.rows());
  SheafGraph sheaf(std::move(g), dims, edge_dim);
  // Edge order from Graph::edges() is sorted; re-align the parsed maps.
  for (auto& e : sheaf.edges) {
    for (const auto& m : maps) {
      if (m.u == e.u && m.v == e.v) {
        e.from_u = m.from_u;
        e.from_v = m.from_v;
      }
    }
  }
  return sheaf;
}

void check_shapes(const SheafGraph& sheaf, const Cochain0& theta) {
  if (static_cast<int>(theta.size()) != sheaf.base.node_count()) {
    throw std::invalid_argument("sheaf: cochain has wrong vertex count");
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i].size() != sheaf.vertex_dims[i]) {
      throw std::invalid_argument("sheaf: cochain dimension mismatch at vertex " +
                                  std::to_string(i));
    }
  }
}

Cochain0 sheaf_laplacian_apply(const SheafGraph& sheaf, const Cochain0& theta) {
  check_shapes(sheaf, theta);
  Cochain0 out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out[i] = Eigen::VectorXd::Zero(sheaf.vertex_dims[i]);
  }
  for (const auto& e : sheaf.edges) {
    const Eigen::VectorXd r = e.from_u * theta[static_cast<std::size_t>(e.u)] -
                              e.from_v * theta[static_cast<std::size_t>(e.v)];
    out[static_cast<std::size_t>(e.u)] += e.from_u.transpose() * r;
    out[static_cast<std::size_t>(e.v)] -= e.from_v.transpose() * r;
  }
  return out;
}

Eigen::MatrixXd sheaf_laplacian_dense(const SheafGraph& sheaf) {
  std::vector<Eigen::Index> offset(sheaf.vertex_dims.size() + 1, 0);
  for (std::size_t i = 0; i < sheaf.vertex_dims.size(); ++i) {
    offset[i + 1] = offset[i] + sheaf.vertex_dims[i];
  }
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(offset.back(), offset.back());
  for (const auto& e : sheaf.edges) {
    const auto u = static_cast<std::size_t>(e.u);
    const auto v = static_cast<std::size_t>(e.v);
    L.block(offset[u], offset[u], sheaf.vertex_dims[u], sheaf.vertex_dims[u]) +=
        e.from_u.transpose() * e.from_u;
    L.block(offset[v], offset[v], sheaf.vertex_dims[v], sheaf.vertex_dims[v]) +=
        e.from_v.transpose() * e.from_v;
    L.block(offset[u], offset[v], sheaf.vertex_dims[u], sheaf.vertex_dims[v]) -=
        e.from_u.transpose() * e.from_v;
    L.block(offset[v], offset[u], sheaf.vertex_dims[v], sheaf.vertex_dims[u]) -=
        e.from_v.transpose() * e.from_u;
  }
  return L;
}

double disagreement(const SheafGraph& sheaf, const Cochain0& theta) {
  check_shapes(sheaf, theta);
  double total = 0.0;
  for (const auto& e : sheaf.edges) {
    total += (e.from_u * theta[static_cast<std::size_t>(e.u)] -
              e.from_v * theta[static_cast<std::size_t>(e.v)])
                 .squaredNorm();
  }
  return total;
}

double laplacian_spectral_radius(const SheafGraph& sheaf, int iterations) {
  Rng rng = Rng::seeded("sheaf-power-iteration", 0);
  Cochain0 v(sheaf.vertex_dims.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = Eigen::VectorXd::NullaryExpr(sheaf.vertex_dims[i], [&](Eigen::Index) {
      return rng.normal();
    });
    norm += v[i].squaredNorm();
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Cochain0 w = sheaf_laplacian_apply(sheaf, v);
    double wnorm = 0.0;
    for (const auto& x : w) wnorm += x.squaredNorm();
    wnorm = std::sqrt(wnorm);
    if (wnorm < 1e-15) return 0.0;
    lambda = wnorm;  // Rayleigh growth of the unit vector
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / wnorm;
  }
  return lambda;
}

DiffusionResult diffuse(const SheafGraph& sheaf, Cochain0 theta, double step, int iterations) {
  check_shapes(sheaf, theta);
  if (step <= 0.0) throw std::invalid_argument("diffuse: step must be positive");
  const double radius = laplacian_spectral_radius(sheaf);
  if (radius > 0.0 && step >= 2.0 / radius) {
    throw std::invalid_argument("diffuse: unstable step (needs step < 2/lambda_max = " +
                                std::to_string(2.0 / radius) + ")");
  }
  DiffusionResult result;
  result.disagreement_trace.push_back(disagreement(sheaf, theta));
  for (int it = 0; it < iterations; ++it) {
    const Cochain0 grad = sheaf_laplacian_apply(sheaf, theta);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= step * grad[i];
    result.disagreement_trace.push_back(disagreement(sheaf, theta));
  }
  result.theta = std::move(theta);
  return result;
}

namespace {

struct NodeTask {
  Eigen::MatrixXd inputs;   // samples x d_i
  Eigen::VectorXd labels;
  Eigen::MatrixXd test_inputs;
  Eigen::VectorXd test_labels;
};

double accuracy(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& theta) {
  const double mse = (x * theta - y).squaredNorm() / static_cast<double>(y.size());
  const double mean = y.mean();
  const double var = (y.array() - mean).square().mean();
  return std::clamp(1.0 - mse / std::max(var, 1e-12), 0.0, 1.0);
}

}  // namespace

LearningResult learn_restrictions(const LearningConfig& config, std::uint64_t seed) {
  if (config.failure_ratio < 0.0 || config.failure_ratio > 1.0) {
    throw std::invalid_argument("learn_restrictions: failure_ratio outside [0,1]");
  }
  Rng root = Rng::seeded("sheaf-learning", seed);
  Rng graph_rng = root.stream("graph");
  Rng task_rng = root.stream("tasks");
  Rng map_rng = root.stream("maps");
  Rng failure_rng = root.stream("failures");

  const Graph graph = Graph::connected_erdos_renyi(config.nodes, config.edge_prob, graph_rng);
  std::vector<int> dims(static_cast<std::size_t>(config.nodes));
  for (std::size_t i = 0; i < dims.size(); ++i) {
    dims[i] = config.dim_choices[i % config.dim_choices.size()];
  }
  SheafGraph sheaf = SheafGraph::random(graph, dims, config.edge_dim, map_rng);

  // Shared 2-d latent, node-specific mixing, one fixed linear readout.
  Eigen::Vector2d readout;
  readout << task_rng.normal(), task_rng.normal();
  std::vector<NodeTask> tasks(static_cast<std::size_t>(config.nodes));
  for (int i = 0; i < config.nodes; ++i) {
    auto& task = tasks[static_cast<std::size_t>(i)];
    const int d = dims[static_cast<std::size_t>(i)];
    Eigen::MatrixXd mixing(d, 2);
    for (Eigen::Index r = 0; r < d; ++r) {
      mixing(r, 0) = task_rng.normal();
      mixing(r, 1) = task_rng.normal();
    }
    const auto fill = [&](Eigen::MatrixXd& x, Eigen::VectorXd& y, int n) {
      x.resize(n, d);
      y.resize(n);
      for (int s = 0; s < n; ++s) {
        Eigen::Vector2d z;
        z << task_rng.normal(), task_rng.normal();
        Eigen::VectorXd obs = mixing * z;
        for (Eigen::Index r = 0; r < d; ++r) obs[r] += config.noise_std * task_rng.normal();
        x.row(s) = obs.transpose();
        y[s] = readout.dot(z);
      }
    };
    fill(task.inputs, task.labels, config.samples_per_node);
    fill(task.test_inputs, task.test_labels, config.test_samples);
  }

  Cochain0 theta(static_cast<std::size_t>(config.nodes));
  for (int i = 0; i < config.nodes; ++i) {
    theta[static_cast<std::size_t>(i)] = Eigen::VectorXd::Zero(dims[static_cast<std::size_t>(i)]);
  }

  std::vector<bool> failed(static_cast<std::size_t>(config.nodes), false);

  ResultSeries history({"round", "train_acc", "test_acc", "disagreement", "objective"});
  for (int round = 0; round < config.rounds; ++round) {
    if (round == config.failure_round && config.failure_ratio > 0.0) {
      const auto count = static_cast<std::size_t>(
          std::llround(config.failure_ratio * config.nodes));
      for (std::size_t idx :
           failure_rng.sample_without_replacement(static_cast<std::size_t>(config.nodes), count)) {
        failed[idx] = true;
        auto& task = tasks[idx];
        const int block = std::min(config.failure_block, dims[idx]);
        task.inputs.leftCols(block).setZero();
        task.test_inputs.leftCols(block).setZero();
      }
    }

    // theta step: local least-squares gradient plus the consensus term.
    const Cochain0 consensus = sheaf_laplacian_apply(sheaf, theta);
    for (int i = 0; i < config.nodes; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const auto& task = tasks[idx];
      const Eigen::VectorXd residual = task.inputs * theta[idx] - task.labels;
      const Eigen::VectorXd grad =
          2.0 / static_cast<double>(task.labels.size()) * (task.inputs.transpose() * residual) +
          2.0 * config.disagreement_weight * consensus[idx];
      theta[idx] -= config.lr_theta * grad;
      if (!theta[idx].allFinite()) {
        throw std::runtime_error("learn_restrictions: divergence at round " +
                                 std::to_string(round) + ", vertex " + std::to_string(i));
      }
    }

    // Restriction-map step with unit-norm rows.
    for (auto& e : sheaf.edges) {
      const auto u = static_cast<std::size_t>(e.u);
      const auto v = static_cast<std::size_t>(e.v);
      const Eigen::VectorXd r = e.from_u * theta[u] - e.from_v * theta[v];
      e.from_u -= config.lr_maps * config.disagreement_weight * 2.0 * r * theta[u].transpose();
      e.from_v += config.lr_maps * config.disagreement_weight * 2.0 * r * theta[v].transpose();
      for (auto* m : {&e.from_u, &e.from_v}) {
        for (Eigen::Index row = 0; row < m->rows(); ++row) {
          const double norm = m->row(row).norm();
          if (norm > 1e-12) m->row(row) /= norm;
        }
      }
    }

    double train = 0.0;
    double test = 0.0;
    double local_loss = 0.0;
    for (int i = 0; i < config.nodes; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      train += accuracy(tasks[idx].inputs, tasks[idx].labels, theta[idx]);
      test += accuracy(tasks[idx].test_inputs, tasks[idx].test_labels, theta[idx]);
      local_loss += (tasks[idx].inputs * theta[idx] - tasks[idx].labels).squaredNorm() /
                    static_cast<double>(tasks[idx].labels.size());
    }
    const double dis = disagreement(sheaf, theta);
    history.add_row({static_cast<double>(round), train / config.nodes, test / config.nodes, dis,
                     local_loss + config.disagreement_weight * dis});
  }
  return {std::move(sheaf), std::move(history)};
}

}  // namespace resilib::sheaf
