#pragma once

// Immutable-by-convention point sets in R^n with CSV / binary export and a
// static kd-tree for nearest-neighbour queries.

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace tsl {

struct PointCloud {
  std::size_t dim = 0;
  std::vector<double> coords;  // row-major, size() * dim entries

  PointCloud() = default;
  explicit PointCloud(std::size_t d) : dim(d) {}

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  bool empty() const { return size() == 0; }
  const double* point(std::size_t i) const { return coords.data() + i * dim; }
  void push(const std::vector<double>& p);
  void append(const PointCloud& other);
};

/// "# dim=n" header then one point per row, 17 significant digits.
void write_csv(std::ostream& os, const PointCloud& cloud);
PointCloud read_csv(std::istream& is);

/// "TLPC1", uint32 dim, uint64 count, then little-endian doubles row-major.
void write_binary(std::ostream& os, const PointCloud& cloud);
PointCloud read_binary(std::istream& is);

class KdTree {
 public:
  explicit KdTree(const PointCloud& cloud);
  ~KdTree();
  KdTree(const KdTree&) = delete;
  KdTree& operator=(const KdTree&) = delete;

  /// Index and Euclidean distance of the nearest stored point.
  std::pair<std::size_t, double> nearest(const double* query) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Largest distance from a point of `from` to its nearest point of `to`.
double directed_hausdorff(const PointCloud& from, const PointCloud& to);

/// Symmetric Hausdorff distance. Throws DimensionMismatch.
double hausdorff(const PointCloud& a, const PointCloud& b);

}  // namespace tsl
