#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "thermofrac/solver.hpp"

namespace thermofrac {

/// Point evaluation of nodal fields through a bucket grid over the elements.
class FieldSampler {
 public:
  explicit FieldSampler(const Mesh& mesh);
  /// Element containing p with barycentric coordinates, if any.
  std::optional<std::pair<Index, Eigen::Vector3d>> locate(const Vec2& p) const;
  std::optional<double> sample(const FEField& f, const Vec2& p) const;

 private:
  const Mesh* mesh_;
  Box box_;
  Index nx_ = 1, ny_ = 1;
  std::vector<std::vector<Index>> buckets_;
};

/// Index of the record with the largest force component (1 = y).
std::size_t peak_record(const std::vector<RunRecord>& records, int component = 1);

/// Mean position of the nodes with s < threshold; nullopt when none.
std::optional<Vec2> damage_centroid(const Mesh& mesh, const FEField& s, double threshold);

/// Largest distance from `origin` to a node with s < threshold (0 if none).
double damage_extent(const Mesh& mesh, const FEField& s, double threshold, const Vec2& origin);

/// Intervals [x_begin, x_end] along y = const where s < threshold.
std::vector<std::pair<double, double>> bands_along_line(const FieldSampler& sampler, const FEField& s, double y,
                                                        double x0, double x1, int samples, double threshold);

struct CrackBands {
  int count = 0;            // bands crossing the counting line
  double mean_depth = 0;    // mean vertical reach of the cracks starting at the probe line
  std::vector<double> depths;
};

/// Cracks growing up from the edge y = y_edge: bands are counted on
/// y = y_count; depths are measured from the bands found on y = y_probe by
/// walking up each band centre until s >= threshold.
CrackBands crack_bands(const Mesh& mesh, const FEField& s, double y_edge, double y_probe, double y_count,
                       double threshold, int samples = 4000);

}  // namespace thermofrac
