#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

namespace pqos {

using Point3 = std::array<double, 3>;

struct PointCloud {
  std::vector<Point3> points;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] bool empty() const noexcept { return points.empty(); }
};

/// Symmetric point-to-point Chamfer distance.
///
/// For every point of `reference` the squared Euclidean distance to its nearest
/// neighbour in `candidate` is accumulated, and vice versa. Distances are
/// squared and never square-rooted, so ({0,0,0}, {1,0,0}) gives 2, not 2 * 1.
/// Accumulation follows the point order of the iterated cloud.
///
/// Throws std::domain_error when either cloud is empty or holds a non-finite
/// coordinate.
[[nodiscard]] double chamfer_sym(const PointCloud& reference, const PointCloud& candidate);

/// Same value as chamfer_sym, with nearest-neighbour queries answered by a
/// k-d tree. Suitable for clouds of a few hundred thousand points.
[[nodiscard]] double chamfer_sym_accelerated(const PointCloud& reference,
                                             const PointCloud& candidate);

/// Static 3-d tree over a borrowed point set.
class KdTree {
 public:
  explicit KdTree(std::span<const Point3> points);

  /// Squared distance to the nearest stored point. Requires a non-empty tree.
  [[nodiscard]] double nearest_squared_distance(const Point3& query) const;

 private:
  struct Node {
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t axis = 0;
    double split = 0.0;
    Point3 lo{};
    Point3 hi{};
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Point3& q, double& best) const;

  std::vector<Point3> points_;
  std::vector<Node> nodes_;
};

/// Reads one point per line as three whitespace-separated decimals. Blank lines
/// and lines starting with '#' are skipped.
[[nodiscard]] PointCloud load_point_cloud(const std::filesystem::path& path);

}  // namespace pqos
