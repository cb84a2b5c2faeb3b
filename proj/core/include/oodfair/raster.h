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

#ifndef OODFAIR_RASTER_H_
#define OODFAIR_RASTER_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "oodfair/scene.h"

namespace oodfair {

using Rgb = std::array<std::uint8_t, 3>;

// Stable colour for a class label (FNV-1a of the label, kept away from the
// background and ground shades).
Rgb class_color(std::string_view label);

// Binary PPM (P6): white background, gray ground, filled class rectangles in
// painter's order.
std::string render_ppm(const Scene& scene);

std::string base64_encode(std::string_view bytes);

}  // namespace oodfair

#endif  // OODFAIR_RASTER_H_
