#include "pqos/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pqos {
namespace {

constexpr std::uint32_t kLeafSize = 8;

inline double squared_distance(const Point3& a, const Point3& b) noexcept {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

void validate(const PointCloud& cloud, const char* which) {
  if (cloud.empty()) {
    throw std::domain_error(std::string("chamfer distance: ") + which + " cloud is empty");
  }
  for (const auto& p : cloud.points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) {
      throw std::domain_error(std::string("chamfer distance: ") + which +
                              " cloud has a non-finite coordinate");
    }
  }
}

double brute_force_directed(const PointCloud& from, const PointCloud& to) {
  double sum = 0.0;
  for (const auto& p : from.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to.points) {
      best = std::min(best, squared_distance(p, q));
    }
    sum += best;
  }
  return sum;
}

double tree_directed(const PointCloud& from, const KdTree& to) {
  double sum = 0.0;
  for (const auto& p : from.points) {
    sum += to.nearest_squared_distance(p);
  }
  return sum;
}

// Squared distance from q to the axis-aligned box [lo, hi].
inline double box_distance(const Point3& q, const Point3& lo, const Point3& hi) noexcept {
  double d = 0.0;
  for (int k = 0; k < 3; ++k) {
    double e = 0.0;
    if (q[k] < lo[k]) {
      e = lo[k] - q[k];
    } else if (q[k] > hi[k]) {
      e = q[k] - hi[k];
    }
    d += e * e;
  }
  return d;
}

}  // namespace

double chamfer_sym(const PointCloud& reference, const PointCloud& candidate) {
  validate(reference, "reference");
  validate(candidate, "candidate");
  return brute_force_directed(reference, candidate) + brute_force_directed(candidate, reference);
}

double chamfer_sym_accelerated(const PointCloud& reference, const PointCloud& candidate) {
  validate(reference, "reference");
  validate(candidate, "candidate");
  const KdTree ref_tree(reference.points);
  const KdTree cand_tree(candidate.points);
  return tree_directed(reference, cand_tree) + tree_directed(candidate, ref_tree);
}

KdTree::KdTree(std::span<const Point3> points) : points_(points.begin(), points.end()) {
  if (points_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::length_error("KdTree: too many points");
  }
  if (!points_.empty()) {
    nodes_.reserve(2 * (points_.size() / kLeafSize + 1));
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  Node node{begin, end};
  node.lo = points_[begin];
  node.hi = points_[begin];
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    for (int k = 0; k < 3; ++k) {
      node.lo[k] = std::min(node.lo[k], points_[i][k]);
      node.hi[k] = std::max(node.hi[k], points_[i][k]);
    }
  }
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) {
    return index;
  }

  std::uint8_t axis = 0;
  double widest = -1.0;
  for (std::uint8_t k = 0; k < 3; ++k) {
    const double w = node.hi[k] - node.lo[k];
    if (w > widest) {
      widest = w;
      axis = k;
    }
  }
  if (widest <= 0.0) {
    return index;  // all points coincide
  }

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(points_.begin() + begin, points_.begin() + mid, points_.begin() + end,
                   [axis](const Point3& a, const Point3& b) { return a[axis] < b[axis]; });
  nodes_[index].axis = axis;
  nodes_[index].split = points_[mid][axis];
  const auto left = build(begin, mid);
  const auto right = build(mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

double KdTree::nearest_squared_distance(const Point3& query) const {
  if (nodes_.empty()) {
    throw std::domain_error("KdTree: nearest neighbour query on an empty tree");
  }
  double best = std::numeric_limits<double>::infinity();
  search(0, query, best);
  return best;
}

void KdTree::search(std::int32_t index, const Point3& q, double& best) const {
  const Node& node = nodes_[static_cast<std::size_t>(index)];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      best = std::min(best, squared_distance(q, points_[i]));
    }
    return;
  }
  std::int32_t near = node.left;
  std::int32_t far = node.right;
  if (q[node.axis] >= node.split) {
    std::swap(near, far);
  }
  const Node& near_node = nodes_[static_cast<std::size_t>(near)];
  if (box_distance(q, near_node.lo, near_node.hi) < best) {
    search(near, q, best);
  }
  const Node& far_node = nodes_[static_cast<std::size_t>(far)];
  if (box_distance(q, far_node.lo, far_node.hi) < best) {
    search(far, q, best);
  }
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open point cloud file: " + path.string());
  }
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    std::istringstream fields(line);
    Point3 p{};
    std::string extra;
    if (!(fields >> p[0] >> p[1] >> p[2]) || (fields >> extra)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected three decimal coordinates");
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace pqos
