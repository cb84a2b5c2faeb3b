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

#include "oodfair/raster.h"

#include <openssl/evp.h>

#include <algorithm>
#include <vector>

namespace oodfair {

Rgb class_color(std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // Channels in [32, 223] never collide with white or the ground gray.
  auto channel = [&](int shift) {
    return static_cast<std::uint8_t>(32 + ((h >> shift) & 0xff) % 192);
  };
  Rgb rgb{channel(0), channel(8), channel(16)};
  if (rgb[0] == rgb[1] && rgb[1] == rgb[2]) rgb[0] = static_cast<std::uint8_t>(rgb[0] ^ 0x40);
  return rgb;
}

std::string render_ppm(const Scene& scene) {
  const int w = scene.width;
  const int h = scene.height;
  std::vector<Rgb> px(static_cast<std::size_t>(w) * h, Rgb{255, 255, 255});
  auto fill = [&](const Box& b, Rgb color) {
    const int x0 = std::max(0, b.x), x1 = std::min(w, b.right());
    const int y0 = std::max(0, b.y), y1 = std::min(h, b.bottom());
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) px[static_cast<std::size_t>(y) * w + x] = color;
    }
  };
  for (const auto& g : scene.ground_regions) fill(g, Rgb{128, 128, 128});

  std::vector<std::size_t> order(scene.objects.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int da = scene.objects[a].depth_rank, db = scene.objects[b].depth_rank;
    return da != db ? da < db : a > b;
  });
  for (std::size_t i : order) fill(scene.objects[i].bbox, class_color(scene.objects[i].class_label));

  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + px.size() * 3);
  for (const Rgb& p : px) out.append(reinterpret_cast<const char*>(p.data()), 3);
  return out;
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace oodfair
