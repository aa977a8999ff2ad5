#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

namespace resilib::tda {

/// Finite point cloud in R^d; one row per point.
struct PointCloud {
  Eigen::MatrixXd points;

  explicit PointCloud(Eigen::MatrixXd pts);
  [[nodiscard]] Eigen::Index size() const { return points.rows(); }
  [[nodiscard]] double distance(Eigen::Index i, Eigen::Index j) const {
    return (points.row(i) - points.row(j)).norm();
  }

  /// CSV rows, one point per line.
  void write_csv(const std::string& path) const;
  static PointCloud read_csv(const std::string& path);
};

/// Simplex of dimension <= 2 with its filtration value.
struct Simplex {
  std::array<int, 3> vertices{-1, -1, -1};  // sorted; unused slots -1
  int dim = 0;
  double value = 0.0;
};

/// Vietoris-Rips filtration: vertices at 0, edges at their length, triangles
/// at their longest edge. Simplices sorted by (value, dim, vertex order).
struct Filtration {
  std::vector<Simplex> simplices;
};

Filtration vr_filtration(const PointCloud& cloud, double gamma_max);

constexpr double kInfDeath = std::numeric_limits<double>::infinity();

struct DiagramPoint {
  double birth = 0.0;
  double death = kInfDeath;
};

/// Multiset of (birth, death) pairs for H0 and H1; zero-persistence pairs are
/// dropped and every essential class carries an infinite death.
struct PersistenceDiagram {
  std::vector<DiagramPoint> h0;
  std::vector<DiagramPoint> h1;

  [[nodiscard]] const std::vector<DiagramPoint>& dim(int p) const;

  /// CSV (dim, birth, death) with an "inf" token.
  void write_csv(const std::string& path) const;
  static PersistenceDiagram read_csv(const std::string& path);
};

/// Boundary-matrix reduction over Z/2 with the clearing optimization.
PersistenceDiagram persistence(const Filtration& filtration);

/// Connected components of the distance graph at scale gamma (union-find);
/// independent H0 route used by tests and the Betti machinery.
int component_count_at(const PointCloud& cloud, double gamma);

/// Betti numbers along gammas: counts of intervals (birth, death] containing
/// each gamma.
std::vector<int> betti_curve(const PersistenceDiagram& diagram, int p,
                             const std::vector<double>& gammas);

/// Exact bottleneck distance by binary search over matching feasibility.
/// Infinite classes must match in count and are paired by sorted births;
/// a mismatch yields +infinity.
double bottleneck_distance(const PersistenceDiagram& d1, const PersistenceDiagram& d2, int p);

}  // namespace resilib::tda
