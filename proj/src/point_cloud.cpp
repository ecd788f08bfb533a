#include "tsl/point_cloud.hpp"

#include "tsl/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace tsl {

void PointCloud::push(const std::vector<double>& p) {
  if (p.size() != dim) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from cloud");
  coords.insert(coords.end(), p.begin(), p.end());
}

void PointCloud::append(const PointCloud& other) {
  if (other.empty()) return;
  if (empty() && dim == 0) dim = other.dim;
  if (other.dim != dim) throw Error(ErrorCode::DimensionMismatch, "cannot append clouds of different dimension");
  coords.insert(coords.end(), other.coords.begin(), other.coords.end());
}

void write_csv(std::ostream& os, const PointCloud& cloud) {
  os << "# dim=" << cloud.dim << "\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double* p = cloud.point(i);
    for (std::size_t k = 0; k < cloud.dim; ++k) os << (k ? "," : "") << p[k];
    os << "\n";
  }
}

PointCloud read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# dim=", 0) != 0)
    throw Error(ErrorCode::SyntaxError, "point cloud CSV must start with '# dim=n'");
  PointCloud cloud(std::stoul(line.substr(6)));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> p;
    while (std::getline(ss, cell, ',')) p.push_back(std::stod(cell));
    cloud.push(p);
  }
  return cloud;
}

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) throw Error(ErrorCode::IoError, "truncated binary cloud");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_binary(std::ostream& os, const PointCloud& cloud) {
  os.write("TLPC1", 5);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(cloud.dim));
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(cloud.size()));
  for (double x : cloud.coords) put_le<double>(os, x);
}

PointCloud read_binary(std::istream& is) {
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, "TLPC1", 5) != 0)
    throw Error(ErrorCode::SyntaxError, "missing TLPC1 magic");
  PointCloud cloud(get_le<std::uint32_t>(is));
  const auto count = get_le<std::uint64_t>(is);
  cloud.coords.resize(static_cast<std::size_t>(count) * cloud.dim);
  for (auto& x : cloud.coords) x = get_le<double>(is);
  return cloud;
}

struct KdTree::Impl {
  const PointCloud* cloud = nullptr;
  std::vector<std::size_t> idx;  // implicit balanced tree over [lo, hi)

  double coord(std::size_t i, std::size_t axis) const { return cloud->point(idx[i])[axis]; }

  void build(std::size_t lo, std::size_t hi, std::size_t depth) {
    if (hi - lo <= 1) return;
    const std::size_t axis = depth % cloud->dim;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(idx.begin() + static_cast<std::ptrdiff_t>(lo), idx.begin() + static_cast<std::ptrdiff_t>(mid),
                     idx.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t a, std::size_t b) {
                       const double xa = cloud->point(a)[axis], xb = cloud->point(b)[axis];
                       return xa < xb || (xa == xb && a < b);
                     });
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  void search(std::size_t lo, std::size_t hi, std::size_t depth, const double* q, std::size_t& best,
              double& best_d2) const {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const double* p = cloud->point(idx[mid]);
    double d2 = 0.0;
    for (std::size_t k = 0; k < cloud->dim; ++k) d2 += (p[k] - q[k]) * (p[k] - q[k]);
    if (d2 < best_d2 || (d2 == best_d2 && idx[mid] < best)) {
      best_d2 = d2;
      best = idx[mid];
    }
    const std::size_t axis = depth % cloud->dim;
    const double diff = q[axis] - p[axis];
    const bool left_first = diff < 0.0;
    if (left_first)
      search(lo, mid, depth + 1, q, best, best_d2);
    else
      search(mid + 1, hi, depth + 1, q, best, best_d2);
    if (diff * diff <= best_d2) {
      if (left_first)
        search(mid + 1, hi, depth + 1, q, best, best_d2);
      else
        search(lo, mid, depth + 1, q, best, best_d2);
    }
  }
};

KdTree::KdTree(const PointCloud& cloud) : impl_(std::make_unique<Impl>()) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyWindow, "kd-tree over an empty cloud");
  impl_->cloud = &cloud;
  impl_->idx.resize(cloud.size());
  std::iota(impl_->idx.begin(), impl_->idx.end(), 0);
  impl_->build(0, cloud.size(), 0);
}

KdTree::~KdTree() = default;

std::pair<std::size_t, double> KdTree::nearest(const double* query) const {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  impl_->search(0, impl_->idx.size(), 0, query, best, best_d2);
  return {best, std::sqrt(best_d2)};
}

double directed_hausdorff(const PointCloud& from, const PointCloud& to) {
  const KdTree tree(to);
  double worst = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) worst = std::max(worst, tree.nearest(from.point(i)).second);
  return worst;
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  if (a.dim != b.dim) throw Error(ErrorCode::DimensionMismatch, "Hausdorff distance between clouds of different dimension");
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyWindow, "Hausdorff distance needs nonempty clouds");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace tsl
