#include "resilib/tda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "resilib/series.hpp"

namespace resilib::tda {

PointCloud::PointCloud(Eigen::MatrixXd pts) : points(std::move(pts)) {
  if (points.rows() == 0 || points.cols() == 0) {
    throw std::invalid_argument("PointCloud: empty");
  }
  if (!points.allFinite()) throw std::invalid_argument("PointCloud: non-finite coordinate");
}

void PointCloud::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("PointCloud::write_csv: cannot open " + path);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      out << format_double(points(i, j)) << (j + 1 == points.cols() ? "" : ",");
    }
    out << '\n';
  }
}

PointCloud PointCloud::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("PointCloud::read_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<double> row;
    while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("PointCloud::read_csv: no points in " + path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw std::runtime_error("PointCloud::read_csv: ragged rows");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return PointCloud(std::move(m));
}

Filtration vr_filtration(const PointCloud& cloud, double gamma_max) {
  if (gamma_max <= 0.0) throw std::invalid_argument("vr_filtration: gamma_max must be positive");
  const int n = static_cast<int>(cloud.size());
  Filtration f;
  for (int i = 0; i < n; ++i) {
    f.simplices.push_back({{i, -1, -1}, 0, 0.0});
  }
  std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                        std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = cloud.distance(i, j);
      dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
      if (d <= gamma_max) f.simplices.push_back({{i, j, -1}, 1, d});
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dij = dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (dij > gamma_max) continue;
      for (int k = j + 1; k < n; ++k) {
        const double djk = dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        const double dik = dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        if (djk > gamma_max || dik > gamma_max) continue;
        f.simplices.push_back({{i, j, k}, 2, std::max({dij, djk, dik})});
      }
    }
  }
  std::sort(f.simplices.begin(), f.simplices.end(), [](const Simplex& a, const Simplex& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
  });
  return f;
}

const std::vector<DiagramPoint>& PersistenceDiagram::dim(int p) const {
  if (p == 0) return h0;
  if (p == 1) return h1;
  throw std::out_of_range("PersistenceDiagram: only dimensions 0 and 1 are tracked");
}

void PersistenceDiagram::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("PersistenceDiagram::write_csv: cannot open " + path);
  out << "dim,birth,death\n";
  for (int p = 0; p <= 1; ++p) {
    for (const auto& pt : dim(p)) {
      out << p << ',' << format_double(pt.birth) << ','
          << (std::isinf(pt.death) ? "inf" : format_double(pt.death)) << '\n';
    }
  }
}

PersistenceDiagram PersistenceDiagram::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("PersistenceDiagram::read_csv: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  PersistenceDiagram d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string dim_tok;
    std::string birth_tok;
    std::string death_tok;
    std::getline(ls, dim_tok, ',');
    std::getline(ls, birth_tok, ',');
    std::getline(ls, death_tok, ',');
    DiagramPoint pt{std::stod(birth_tok),
                    death_tok == "inf" ? kInfDeath : std::stod(death_tok)};
    (dim_tok == "0" ? d.h0 : d.h1).push_back(pt);
  }
  return d;
}

namespace {

// Column of the Z/2 boundary matrix as a sorted list of row indices.
using Column = std::vector<int>;

void xor_into(Column& target, const Column& other) {
  Column merged;
  merged.reserve(target.size() + other.size());
  std::set_symmetric_difference(target.begin(), target.end(), other.begin(), other.end(),
                                std::back_inserter(merged));
  target = std::move(merged);
}

struct FaceKey {
  int a;
  int b;
  bool operator<(const FaceKey& o) const { return std::tie(a, b) < std::tie(o.a, o.b); }
};

}  // namespace

PersistenceDiagram persistence(const Filtration& filtration) {
  const auto& simplices = filtration.simplices;
  const int m = static_cast<int>(simplices.size());

  std::vector<int> vertex_index;
  std::map<FaceKey, int> edge_index;
  for (int j = 0; j < m; ++j) {
    const Simplex& s = simplices[j];
    if (s.dim == 0) {
      const auto v = static_cast<std::size_t>(s.vertices[0]);
      if (vertex_index.size() <= v) vertex_index.resize(v + 1, -1);
      vertex_index[v] = j;
    } else if (s.dim == 1) {
      edge_index[{s.vertices[0], s.vertices[1]}] = j;
    }
  }

  const auto boundary = [&](int j) -> Column {
    const Simplex& s = simplices[j];
    Column col;
    if (s.dim == 1) {
      col = {vertex_index[static_cast<std::size_t>(s.vertices[0])],
             vertex_index[static_cast<std::size_t>(s.vertices[1])]};
    } else if (s.dim == 2) {
      const auto face = [&](int a, int b) {
        const auto it = edge_index.find({a, b});
        if (it == edge_index.end()) {
          throw std::invalid_argument("persistence: face condition violated (missing edge)");
        }
        return it->second;
      };
      col = {face(s.vertices[0], s.vertices[1]), face(s.vertices[0], s.vertices[2]),
             face(s.vertices[1], s.vertices[2])};
    }
    std::sort(col.begin(), col.end());
    for (int row : col) {
      if (row < 0) throw std::invalid_argument("persistence: face condition violated");
      if (row >= j) throw std::invalid_argument("persistence: face appears after coface");
    }
    return col;
  };

  std::vector<int> low_owner(static_cast<std::size_t>(m), -1);  // pivot row -> column
  std::vector<bool> cleared(static_cast<std::size_t>(m), false);
  std::vector<bool> is_death(static_cast<std::size_t>(m), false);
  std::vector<std::pair<int, int>> pairs;
  std::vector<Column> reduced(static_cast<std::size_t>(m));

  // Twist/clearing order: reduce higher dimensions first so that columns of
  // simplices already identified as births can be skipped.
  for (int d = 2; d >= 1; --d) {
    for (int j = 0; j < m; ++j) {
      if (simplices[j].dim != d || cleared[static_cast<std::size_t>(j)]) continue;
      Column col = boundary(j);
      while (!col.empty()) {
        const int pivot = col.back();
        const int owner = low_owner[static_cast<std::size_t>(pivot)];
        if (owner < 0) break;
        xor_into(col, reduced[static_cast<std::size_t>(owner)]);
      }
      if (!col.empty()) {
        const int pivot = col.back();
        low_owner[static_cast<std::size_t>(pivot)] = j;
        cleared[static_cast<std::size_t>(pivot)] = true;
        is_death[static_cast<std::size_t>(j)] = true;
        pairs.emplace_back(pivot, j);
        reduced[static_cast<std::size_t>(j)] = std::move(col);
      }
    }
  }

  PersistenceDiagram diagram;
  std::vector<bool> paired_as_birth(static_cast<std::size_t>(m), false);
  for (auto [birth, death] : pairs) {
    paired_as_birth[static_cast<std::size_t>(birth)] = true;
    const double b = simplices[birth].value;
    const double dvalue = simplices[death].value;
    if (dvalue <= b) continue;  // zero persistence
    if (simplices[birth].dim == 0) {
      diagram.h0.push_back({b, dvalue});
    } else if (simplices[birth].dim == 1) {
      diagram.h1.push_back({b, dvalue});
    }
  }
  // Essential classes: simplices that neither die nor kill.
  for (int j = 0; j < m; ++j) {
    if (paired_as_birth[static_cast<std::size_t>(j)] || is_death[static_cast<std::size_t>(j)]) {
      continue;
    }
    if (simplices[j].dim == 0) {
      diagram.h0.push_back({simplices[j].value, kInfDeath});
    } else if (simplices[j].dim == 1) {
      diagram.h1.push_back({simplices[j].value, kInfDeath});
    }
  }
  const auto order = [](const DiagramPoint& a, const DiagramPoint& b) {
    return std::tie(a.birth, a.death) < std::tie(b.birth, b.death);
  };
  std::sort(diagram.h0.begin(), diagram.h0.end(), order);
  std::sort(diagram.h1.begin(), diagram.h1.end(), order);
  return diagram;
}

int component_count_at(const PointCloud& cloud, double gamma) {
  const int n = static_cast<int>(cloud.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (cloud.distance(i, j) > gamma) continue;
      const int a = find(i);
      const int b = find(j);
      if (a != b) {
        parent[static_cast<std::size_t>(a)] = b;
        --components;
      }
    }
  }
  return components;
}

std::vector<int> betti_curve(const PersistenceDiagram& diagram, int p,
                             const std::vector<double>& gammas) {
  const auto& bars = diagram.dim(p);
  std::vector<int> out;
  out.reserve(gammas.size());
  for (double g : gammas) {
    int count = 0;
    for (const auto& bar : bars) {
      if (bar.birth < g && g <= bar.death) ++count;
    }
    out.push_back(count);
  }
  return out;
}

namespace {

// Kuhn's augmenting-path bipartite matching.
struct Matcher {
  int left_size;
  int right_size;
  std::vector<std::vector<int>> adj;
  std::vector<int> match_right;

  explicit Matcher(int l, int r)
      : left_size(l), right_size(r), adj(static_cast<std::size_t>(l)) {}

  bool try_augment(int u, std::vector<bool>& visited) {
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (visited[static_cast<std::size_t>(v)]) continue;
      visited[static_cast<std::size_t>(v)] = true;
      if (match_right[static_cast<std::size_t>(v)] < 0 ||
          try_augment(match_right[static_cast<std::size_t>(v)], visited)) {
        match_right[static_cast<std::size_t>(v)] = u;
        return true;
      }
    }
    return false;
  }

  int max_matching() {
    match_right.assign(static_cast<std::size_t>(right_size), -1);
    int size = 0;
    for (int u = 0; u < left_size; ++u) {
      std::vector<bool> visited(static_cast<std::size_t>(right_size), false);
      if (try_augment(u, visited)) ++size;
    }
    return size;
  }
};

// Perfect matching feasibility at threshold delta for the finite parts.
bool feasible_at(const std::vector<DiagramPoint>& a, const std::vector<DiagramPoint>& b,
                 double delta) {
  const int n1 = static_cast<int>(a.size());
  const int n2 = static_cast<int>(b.size());
  // Left: a-points then n2 diagonal slots; right: b-points then n1 slots.
  Matcher m(n1 + n2, n2 + n1);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const double cost =
          std::max(std::abs(a[static_cast<std::size_t>(i)].birth - b[static_cast<std::size_t>(j)].birth),
                   std::abs(a[static_cast<std::size_t>(i)].death - b[static_cast<std::size_t>(j)].death));
      if (cost <= delta) m.adj[static_cast<std::size_t>(i)].push_back(j);
    }
    const double diag =
        (a[static_cast<std::size_t>(i)].death - a[static_cast<std::size_t>(i)].birth) / 2.0;
    if (diag <= delta) m.adj[static_cast<std::size_t>(i)].push_back(n2 + i);
  }
  for (int j = 0; j < n2; ++j) {
    const double diag =
        (b[static_cast<std::size_t>(j)].death - b[static_cast<std::size_t>(j)].birth) / 2.0;
    auto& row = m.adj[static_cast<std::size_t>(n1 + j)];
    if (diag <= delta) row.push_back(j);
    for (int i = 0; i < n1; ++i) row.push_back(n2 + i);  // diagonal-diagonal, cost 0
  }
  return m.max_matching() == n1 + n2;
}

}  // namespace

double bottleneck_distance(const PersistenceDiagram& d1, const PersistenceDiagram& d2, int p) {
  std::vector<DiagramPoint> finite1;
  std::vector<DiagramPoint> finite2;
  std::vector<double> inf1;
  std::vector<double> inf2;
  for (const auto& pt : d1.dim(p)) {
    if (std::isinf(pt.death)) {
      inf1.push_back(pt.birth);
    } else {
      finite1.push_back(pt);
    }
  }
  for (const auto& pt : d2.dim(p)) {
    if (std::isinf(pt.death)) {
      inf2.push_back(pt.birth);
    } else {
      finite2.push_back(pt);
    }
  }
  if (inf1.size() != inf2.size()) return std::numeric_limits<double>::infinity();
  double essential = 0.0;
  std::sort(inf1.begin(), inf1.end());
  std::sort(inf2.begin(), inf2.end());
  for (std::size_t i = 0; i < inf1.size(); ++i) {
    essential = std::max(essential, std::abs(inf1[i] - inf2[i]));
  }
  if (finite1.empty() && finite2.empty()) return essential;

  // Candidate thresholds: all pairwise sup-norm costs plus diagonal costs.
  std::vector<double> candidates{0.0};
  for (const auto& a : finite1) {
    for (const auto& b : finite2) {
      candidates.push_back(std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death)));
    }
    candidates.push_back((a.death - a.birth) / 2.0);
  }
  for (const auto& b : finite2) candidates.push_back((b.death - b.birth) / 2.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible_at(finite1, finite2, candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return std::max(essential, candidates[lo]);
}

}  // namespace resilib::tda
