#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "uidla/analysis.hpp"
#include "uidla/harness.hpp"

namespace uidla {

void render_symdiff(const Aggregate& a, const std::string& out_path) {
  if (a.dim() != 2) throw std::runtime_error("render_symdiff: requires d = 2");
  if (a.empty()) throw std::runtime_error("render_symdiff: empty aggregate");

  const double req = ball_radius_equiv(2, a.size());
  const int64_t req2 = radius_sq_threshold(req);
  const int extent = int(std::ceil(std::max(a.outradius(), req))) + 2;
  const int side = 2 * extent + 1;

  // White canvas; one lattice site per pixel, origin at the center.
  std::vector<unsigned char> rgb(size_t(side) * size_t(side) * 3, 255);
  auto paint = [&](int x, int y, unsigned char r, unsigned char g, unsigned char b) {
    size_t px = size_t(y + extent) * size_t(side) + size_t(x + extent);
    rgb[3 * px] = r;
    rgb[3 * px + 1] = g;
    rgb[3 * px + 2] = b;
  };

  // Aggregate-but-not-ball sites in blue.
  for (const Point& p : a.sites()) {
    if (p.norm2() > req2) paint(p.c[0], p.c[1], 0, 0, 255);
  }
  // Ball-but-not-aggregate sites in red.
  for (const Point& p : ball_points(2, req)) {
    if (!a.contains(p)) paint(p.c[0], p.c[1], 255, 0, 0);
  }

  std::string tmp = out_path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("render: cannot open " + out_path);
    out << "P6\n" << side << ' ' << side << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data()), std::streamsize(rgb.size()));
    if (!out) throw std::runtime_error("render: write failed");
  }
  if (std::rename(tmp.c_str(), out_path.c_str()) != 0) {
    throw std::runtime_error("render: rename failed");
  }
}

PpmImage read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_ppm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw std::runtime_error("read_ppm: not a P6 file");
  PpmImage img;
  int maxval = 0;
  in >> img.width >> img.height >> maxval;
  if (!in || img.width <= 0 || img.height <= 0 || maxval != 255) {
    throw std::runtime_error("read_ppm: malformed header");
  }
  in.get();  // single whitespace after maxval
  img.rgb.resize(size_t(img.width) * size_t(img.height) * 3);
  in.read(reinterpret_cast<char*>(img.rgb.data()), std::streamsize(img.rgb.size()));
  if (in.gcount() != std::streamsize(img.rgb.size())) {
    throw std::runtime_error("read_ppm: truncated pixel data");
  }
  return img;
}

}  // namespace uidla
