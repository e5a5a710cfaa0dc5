#include "thermofrac/postprocess.hpp"

#include <algorithm>
#include <cmath>

#include "thermofrac/error.hpp"

namespace thermofrac {

FieldSampler::FieldSampler(const Mesh& mesh) : mesh_(&mesh), box_(mesh.bounding_box()) {
  const auto n = static_cast<double>(std::max<Index>(1, mesh.num_elements()));
  const double aspect = box_.height() > 0 ? box_.width() / box_.height() : 1.0;
  nx_ = std::max<Index>(1, static_cast<Index>(std::sqrt(n * aspect)));
  ny_ = std::max<Index>(1, static_cast<Index>(n / static_cast<double>(nx_)));
  buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
  auto cell = [&](double v, double lo, double width, Index count) {
    const auto i = static_cast<Index>(std::floor((v - lo) / width * static_cast<double>(count)));
    return std::clamp<Index>(i, 0, count - 1);
  };
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto& v = mesh.element(e).nodes;
    double x0 = mesh.node(v[0]).x(), x1 = x0, y0 = mesh.node(v[0]).y(), y1 = y0;
    for (Index k : v) {
      x0 = std::min(x0, mesh.node(k).x());
      x1 = std::max(x1, mesh.node(k).x());
      y0 = std::min(y0, mesh.node(k).y());
      y1 = std::max(y1, mesh.node(k).y());
    }
    for (Index i = cell(x0, box_.x0, box_.width(), nx_); i <= cell(x1, box_.x0, box_.width(), nx_); ++i)
      for (Index j = cell(y0, box_.y0, box_.height(), ny_); j <= cell(y1, box_.y0, box_.height(), ny_); ++j)
        buckets_[static_cast<std::size_t>(j * nx_ + i)].push_back(e);
  }
}

std::optional<std::pair<Index, Eigen::Vector3d>> FieldSampler::locate(const Vec2& p) const {
  const double tol = 1e-12 * std::hypot(box_.width(), box_.height());
  if (!box_.contains(p, tol)) return std::nullopt;
  const auto i = std::clamp<Index>(static_cast<Index>(std::floor((p.x() - box_.x0) / box_.width() * static_cast<double>(nx_))), 0, nx_ - 1);
  const auto j = std::clamp<Index>(static_cast<Index>(std::floor((p.y() - box_.y0) / box_.height() * static_cast<double>(ny_))), 0, ny_ - 1);
  for (Index e : buckets_[static_cast<std::size_t>(j * nx_ + i)]) {
    const auto& v = mesh_->element(e).nodes;
    const Vec2& a = mesh_->node(v[0]);
    const Vec2& b = mesh_->node(v[1]);
    const Vec2& c = mesh_->node(v[2]);
    const Vec2 e1 = b - a, e2 = c - a, d = p - a;
    const double det = e1.x() * e2.y() - e2.x() * e1.y();
    const Vec2 r((d.x() * e2.y() - e2.x() * d.y()) / det, (e1.x() * d.y() - d.x() * e1.y()) / det);
    const Eigen::Vector3d xi(1 - r.x() - r.y(), r.x(), r.y());
    if (xi.minCoeff() >= -1e-10) return std::make_pair(e, xi);
  }
  return std::nullopt;
}

std::optional<double> FieldSampler::sample(const FEField& f, const Vec2& p) const {
  const auto hit = locate(p);
  if (!hit) return std::nullopt;
  const auto& v = mesh_->element(hit->first).nodes;
  return hit->second.dot(Eigen::Vector3d(f(v[0]), f(v[1]), f(v[2])));
}

std::size_t peak_record(const std::vector<RunRecord>& records, int component) {
  if (records.empty()) throw InvalidArgument("peak_record: no records");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].force(component) > records[best].force(component)) best = i;
  return best;
}

std::optional<Vec2> damage_centroid(const Mesh& mesh, const FEField& s, double threshold) {
  Vec2 sum = Vec2::Zero();
  Index n = 0;
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    if (s(i) < threshold) {
      sum += mesh.node(i);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return Vec2(sum / static_cast<double>(n));
}

double damage_extent(const Mesh& mesh, const FEField& s, double threshold, const Vec2& origin) {
  double d = 0;
  for (Index i = 0; i < mesh.num_nodes(); ++i)
    if (s(i) < threshold) d = std::max(d, (mesh.node(i) - origin).norm());
  return d;
}

std::vector<std::pair<double, double>> bands_along_line(const FieldSampler& sampler, const FEField& s, double y,
                                                        double x0, double x1, int samples, double threshold) {
  std::vector<std::pair<double, double>> bands;
  bool inside = false;
  double start = 0, last = 0;
  for (int k = 0; k <= samples; ++k) {
    const double x = x0 + (x1 - x0) * k / samples;
    const auto v = sampler.sample(s, {x, y});
    const bool damaged = v && *v < threshold;
    if (damaged && !inside) {
      inside = true;
      start = x;
    }
    if (!damaged && inside) {
      inside = false;
      bands.emplace_back(start, last);
    }
    if (damaged) last = x;
  }
  if (inside) bands.emplace_back(start, last);
  return bands;
}

CrackBands crack_bands(const Mesh& mesh, const FEField& s, double y_edge, double y_probe, double y_count,
                       double threshold, int samples) {
  const FieldSampler sampler(mesh);
  const Box bb = mesh.bounding_box();
  CrackBands out;
  out.count = static_cast<int>(bands_along_line(sampler, s, y_count, bb.x0, bb.x1, samples, threshold).size());
  const double dy = bb.height() / samples;
  const double dir = y_probe >= y_edge ? 1.0 : -1.0;
  for (const auto& [a, b] : bands_along_line(sampler, s, y_probe, bb.x0, bb.x1, samples, threshold)) {
    const double x = 0.5 * (a + b);
    double y = y_probe;
    while (true) {
      const double next = y + dir * dy;
      const auto v = sampler.sample(s, {x, next});
      if (!v || *v >= threshold) break;
      y = next;
    }
    out.depths.push_back(std::abs(y - y_edge));
  }
  if (!out.depths.empty()) {
    double sum = 0;
    for (double d : out.depths) sum += d;
    out.mean_depth = sum / static_cast<double>(out.depths.size());
  }
  return out;
}

}  // namespace thermofrac
