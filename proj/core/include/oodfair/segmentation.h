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

#ifndef OODFAIR_SEGMENTATION_H_
#define OODFAIR_SEGMENTATION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oodfair/scene.h"

namespace oodfair {

struct GridResolution {
  int cols = 1;
  int rows = 1;
  bool operator==(const GridResolution&) const = default;
};

// Half-open index range [begin, end).
struct CellRange {
  int begin = 0;
  int end = 0;
  bool empty() const { return begin >= end; }
};

// Per-cell labelling of a scene. A cell is owned by the object of highest
// depth_rank whose box contains the cell centre (earlier objects win ties),
// otherwise it is ground if a ground region contains the centre, otherwise
// background.
class SegmentationGrid {
 public:
  static constexpr std::int32_t kBackground = -2;
  static constexpr std::int32_t kGround = -1;

  SegmentationGrid(GridResolution resolution, int canvas_width, int canvas_height);

  GridResolution resolution() const { return resolution_; }
  int cols() const { return resolution_.cols; }
  int rows() const { return resolution_.rows; }

  // Object index into the source scene, or kGround / kBackground.
  std::int32_t owner(int col, int row) const {
    return cells_[static_cast<std::size_t>(row) * resolution_.cols + col];
  }
  std::string_view label(int col, int row) const;

  // Cells whose centres fall inside the pixel range [lo, hi) along one axis.
  CellRange col_range(int lo, int hi) const;
  CellRange row_range(int lo, int hi) const;
  // Row holding pixel row y (every pixel maps to exactly one cell row).
  int row_of_pixel(int y) const;

  // Overwrites every cell whose centre lies in `box`.
  void paint(const Box& box, std::int32_t owner, std::string_view label = {});

  // Number of cells whose centre lies in `box`.
  long long cells_in(const Box& box) const;
  // Number of cells inside `box` currently owned by `owner`.
  long long cells_owned(const Box& box, std::int32_t owner) const;

  bool operator==(const SegmentationGrid&) const = default;

 private:
  GridResolution resolution_;
  int canvas_width_;
  int canvas_height_;
  std::vector<std::int32_t> cells_;
  std::vector<std::string> labels_;  // class label per object index
};

// Default resolution is the canvas size (one cell per pixel).
SegmentationGrid derive_segmentation(const Scene& scene,
                                     std::optional<GridResolution> resolution = std::nullopt);

}  // namespace oodfair

#endif  // OODFAIR_SEGMENTATION_H_
