/*
 * Copyright 2026 The oodfair Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "oodfair/segmentation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oodfair/errors.h"

namespace oodfair {
namespace {

// Centre of cell i along an axis of `extent` pixels split into `n` cells.
double centre(int i, int n, int extent) {
  return (static_cast<double>(i) + 0.5) * static_cast<double>(extent) / n;
}

CellRange range_for(int lo, int hi, int n, int extent) {
  // First cell whose centre is >= lo; then walk to the first centre >= hi.
  int b = static_cast<int>(std::ceil(static_cast<double>(lo) * n / extent - 0.5));
  b = std::clamp(b, 0, n);
  while (b > 0 && centre(b - 1, n, extent) >= lo) --b;
  while (b < n && centre(b, n, extent) < lo) ++b;
  int e = static_cast<int>(std::ceil(static_cast<double>(hi) * n / extent - 0.5));
  e = std::clamp(e, b, n);
  while (e > b && centre(e - 1, n, extent) >= hi) --e;
  while (e < n && centre(e, n, extent) < hi) ++e;
  return {b, e};
}

}  // namespace

SegmentationGrid::SegmentationGrid(GridResolution resolution, int canvas_width,
                                   int canvas_height)
    : resolution_(resolution),
      canvas_width_(canvas_width),
      canvas_height_(canvas_height) {
  if (resolution.cols < 1 || resolution.rows < 1) {
    throw Error(ErrorCode::kConfig, "segmentation resolution must be >= (1,1)");
  }
  cells_.assign(static_cast<std::size_t>(resolution.cols) * resolution.rows, kBackground);
}

std::string_view SegmentationGrid::label(int col, int row) const {
  const std::int32_t o = owner(col, row);
  if (o == kBackground) return "background";
  if (o == kGround) return "ground";
  const auto idx = static_cast<std::size_t>(o);
  return idx < labels_.size() ? std::string_view(labels_[idx]) : std::string_view("object");
}

CellRange SegmentationGrid::col_range(int lo, int hi) const {
  return range_for(lo, hi, resolution_.cols, canvas_width_);
}

CellRange SegmentationGrid::row_range(int lo, int hi) const {
  return range_for(lo, hi, resolution_.rows, canvas_height_);
}

int SegmentationGrid::row_of_pixel(int y) const {
  const int r = static_cast<int>(static_cast<long long>(y) * resolution_.rows / canvas_height_);
  return std::clamp(r, 0, resolution_.rows - 1);
}

void SegmentationGrid::paint(const Box& box, std::int32_t owner, std::string_view label) {
  if (owner >= 0) {
    const auto idx = static_cast<std::size_t>(owner);
    if (labels_.size() <= idx) labels_.resize(idx + 1);
    if (!label.empty()) labels_[idx] = std::string(label);
  }
  const CellRange cr = col_range(box.x, box.right());
  const CellRange rr = row_range(box.y, box.bottom());
  for (int r = rr.begin; r < rr.end; ++r) {
    auto* row = &cells_[static_cast<std::size_t>(r) * resolution_.cols];
    std::fill(row + cr.begin, row + cr.end, owner);
  }
}

long long SegmentationGrid::cells_in(const Box& box) const {
  const CellRange cr = col_range(box.x, box.right());
  const CellRange rr = row_range(box.y, box.bottom());
  if (cr.empty() || rr.empty()) return 0;
  return static_cast<long long>(cr.end - cr.begin) * (rr.end - rr.begin);
}

long long SegmentationGrid::cells_owned(const Box& box, std::int32_t who) const {
  const CellRange cr = col_range(box.x, box.right());
  const CellRange rr = row_range(box.y, box.bottom());
  long long n = 0;
  for (int r = rr.begin; r < rr.end; ++r) {
    for (int c = cr.begin; c < cr.end; ++c) n += owner(c, r) == who;
  }
  return n;
}

SegmentationGrid derive_segmentation(const Scene& scene,
                                     std::optional<GridResolution> resolution) {
  const GridResolution res = resolution.value_or(GridResolution{scene.width, scene.height});
  SegmentationGrid grid(res, scene.width, scene.height);
  for (const auto& g : scene.ground_regions) grid.paint(g, SegmentationGrid::kGround);

  // Painter's order: lowest depth first; within equal depth, later objects
  // first so the earliest object ends on top.
  std::vector<std::size_t> order(scene.objects.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int da = scene.objects[a].depth_rank;
    const int db = scene.objects[b].depth_rank;
    if (da != db) return da < db;
    return a > b;
  });
  for (std::size_t i : order) {
    const auto& o = scene.objects[i];
    grid.paint(o.bbox, static_cast<std::int32_t>(i), o.class_label);
  }
  return grid;
}

}  // namespace oodfair
