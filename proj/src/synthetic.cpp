#include "dbi/synthetic.hpp"

#include <cmath>
#include <stdexcept>

namespace dbi {

namespace {

double clamp255(double v) { return v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v); }

// smooth-edged disk indicator; edge transition ~1.2 px
double disk(double x, double y, double cx, double cy, double radius,
            double px_scale) {
  const double d = std::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy));
  return 0.5 * (1.0 - std::tanh((d - radius) * px_scale / 1.2));
}

// deterministic fine-scale texture, a few incommensurate waves
double texture(double u, double v) {
  return 5.0 * std::sin(6.28318530718 * (9.0 * u + 13.0 * v) + 1.7) +
         4.0 * std::sin(6.28318530718 * (23.0 * u - 7.0 * v) + 0.4) +
         3.0 * std::sin(6.28318530718 * (15.0 * u * v + 31.0 * v)) +
         2.5 * std::sin(6.28318530718 * 41.0 * u) *
             std::cos(6.28318530718 * 37.0 * v);
}

Raster make_shapes(int w, int h) {
  Raster img(w, h);
  const double px = std::min(w, h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      const double u = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
      const double v = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
      double val = 70.0 + 90.0 * u + 25.0 * v;
      val = val * (1.0 - disk(u, v, 0.32, 0.34, 0.20, px)) +
            225.0 * disk(u, v, 0.32, 0.34, 0.20, px);
      val = val * (1.0 - disk(u, v, 0.70, 0.62, 0.16, px)) +
            35.0 * disk(u, v, 0.70, 0.62, 0.16, px);
      // horizontal bright bar
      const double bar = 0.5 * (std::tanh((v - 0.78) * px / 1.2) -
                                std::tanh((v - 0.88) * px / 1.2));
      val = val * (1.0 - bar) + 180.0 * bar;
      // vertical dark bar
      const double post = 0.5 * (std::tanh((u - 0.08) * px / 1.2) -
                                 std::tanh((u - 0.14) * px / 1.2));
      val = val * (1.0 - post) + 60.0 * post;
      val += texture(u, v);
      img(x, y) = clamp255(val);
    }
  }
  return img;
}

Raster make_waves(int w, int h) {
  Raster img(w, h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      const double u = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
      const double v = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
      const double phase = 9.0 * u + 2.2 * std::sin(6.28318530718 * v);
      double val = 120.0 + 55.0 * std::sin(6.28318530718 * phase * 0.5) *
                               std::cos(6.28318530718 * 2.0 * v);
      val += 50.0 * u - 20.0 * v;
      val += 0.8 * texture(v, u);
      img(x, y) = clamp255(val);
    }
  }
  return img;
}

Raster make_blobs(int w, int h) {
  Raster img(w, h);
  const double px = std::min(w, h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      const double u = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
      const double v = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
      double val = 90.0;
      auto bump = [&](double cx, double cy, double s, double amp) {
        const double d2 = (u - cx) * (u - cx) + (v - cy) * (v - cy);
        val += amp * std::exp(-d2 / (2.0 * s * s));
      };
      bump(0.25, 0.3, 0.10, 110.0);
      bump(0.72, 0.25, 0.07, 80.0);
      bump(0.6, 0.72, 0.14, -55.0);
      bump(0.2, 0.78, 0.06, 95.0);
      // diagonal step edge, pixel-sharp
      val += 45.0 * 0.5 * (1.0 + std::tanh((v - 0.55 - 0.25 * u) * px / 1.0));
      val += 0.9 * texture(u, v);
      img(x, y) = clamp255(val);
    }
  }
  return img;
}

Raster make_portrait(int w, int h) {
  Raster img(w, h);
  const double px = std::min(w, h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      const double u = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
      const double v = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
      double val = 45.0 + 65.0 * u + 15.0 * v;
      // large soft-edged ellipse with its own interior shading
      const double eu = (u - 0.42) / 0.30;
      const double ev = (v - 0.44) / 0.36;
      const double de = std::sqrt(eu * eu + ev * ev);
      const double face = 0.5 * (1.0 - std::tanh((de - 1.0) * 0.30 * px / 2.5));
      val = val * (1.0 - face) +
            (165.0 + 55.0 * (u - 0.3) + 35.0 * (v - 0.3)) * face;
      auto dot = [&](double cx, double cy, double rr, double amp) {
        const double d = std::sqrt((u - cx) * (u - cx) + (v - cy) * (v - cy));
        const double ind = 0.5 * (1.0 - std::tanh((d - rr) * px / 2.0));
        val = val * (1.0 - ind) + amp * ind;
      };
      dot(0.34, 0.38, 0.045, 40.0);
      dot(0.52, 0.38, 0.045, 40.0);
      dot(0.82, 0.70, 0.08, 235.0);
      const double band = 0.5 * (std::tanh((v - 0.05) * px / 2.5) -
                                 std::tanh((v - 0.16) * px / 2.5));
      val = val * (1.0 - band) + 210.0 * band;
      // textured wrap at the bottom, smooth elsewhere
      const double scarf = 0.5 * (1.0 + std::tanh((v - 0.80) * px / 2.0));
      val += (0.2 + 1.6 * scarf) * texture(u, v);
      img(x, y) = clamp255(val);
    }
  }
  return img;
}

Raster make_scene(int w, int h) {
  Raster img(w, h);
  const double px = std::min(w, h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      const double u = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
      const double v = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
      double val = 225.0 - 70.0 * v + 15.0 * u; // sky
      auto cloud = [&](double cx, double cy, double rx, double ry, double amp) {
        const double d = std::sqrt((u - cx) * (u - cx) / (rx * rx) +
                                   (v - cy) * (v - cy) / (ry * ry));
        val += amp * 0.5 * (1.0 - std::tanh((d - 1.0) * rx * px / 3.0));
      };
      cloud(0.28, 0.15, 0.20, 0.11, -55.0);
      cloud(0.58, 0.32, 0.16, 0.08, -44.0);
      cloud(0.10, 0.38, 0.12, 0.06, -33.0);
      const double ds =
          std::sqrt((u - 0.82) * (u - 0.82) + (v - 0.12) * (v - 0.12));
      const double sun = 0.5 * (1.0 - std::tanh((ds - 0.09) * px / 2.5));
      val = val * (1.0 - sun) + 95.0 * sun;
      // undulating horizon with shaded ground
      const double hill_v = 0.55 + 0.18 * std::sin(6.28318530718 * 0.5 * u + 0.8);
      const double hill = 0.5 * (1.0 + std::tanh((v - hill_v) * px / 2.5));
      val = val * (1.0 - hill) +
            (70.0 - 45.0 * (v - hill_v) +
             36.0 * std::cos(6.28318530718 * 0.8 * u)) *
                hill;
      const double trunk = 0.5 *
                           (std::tanh((u - 0.22) * px / 2.5) -
                            std::tanh((u - 0.29) * px / 2.5)) *
                           0.5 * (1.0 + std::tanh((0.60 - v) * px / 2.0));
      val = val * (1.0 - trunk) + 200.0 * trunk;
      // textured ground, nearly smooth sky
      val += (0.3 + 0.4 * hill) * texture(u, v);
      img(x, y) = clamp255(val);
    }
  }
  return img;
}

Raster make_rings(int w, int h) {
  Raster img(w, h);
  const double px = std::min(w, h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      const double u = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
      const double v = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
      const double r =
          std::sqrt((u - 0.45) * (u - 0.45) + (v - 0.40) * (v - 0.40));
      double val = 115.0 + 22.0 * u - 10.0 * v +
                   55.0 * std::sin(6.28318530718 * 4.5 * r);
      val += 25.0 * 0.5 * (1.0 + std::tanh((v - 0.84) * px / 2.0));
      val += 0.8 * texture(u, v);
      img(x, y) = clamp255(val);
    }
  }
  return img;
}

Raster make_ramp(int w, int h) {
  Raster img(w, h);
  for (int x = 0; x < w; ++x)
    for (int y = 0; y < h; ++y)
      img(x, y) = 255.0 * (w > 1 ? static_cast<double>(x) / (w - 1) : 0.0);
  return img;
}

Raster make_step(int w, int h) {
  Raster img(w, h);
  for (int x = 0; x < w; ++x)
    for (int y = 0; y < h; ++y) img(x, y) = x < w / 2 ? 64.0 : 192.0;
  return img;
}

} // namespace

Raster synthetic_image(const std::string &kind, int width, int height) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("synthetic_image: bad dimensions");
  if (kind == "shapes") return make_shapes(width, height);
  if (kind == "waves") return make_waves(width, height);
  if (kind == "blobs") return make_blobs(width, height);
  if (kind == "portrait") return make_portrait(width, height);
  if (kind == "scene") return make_scene(width, height);
  if (kind == "rings") return make_rings(width, height);
  if (kind == "ramp") return make_ramp(width, height);
  if (kind == "step") return make_step(width, height);
  throw std::invalid_argument("synthetic_image: unknown kind '" + kind + "'");
}

std::vector<std::string> synthetic_kinds() {
  return {"shapes", "portrait", "scene", "waves", "rings", "blobs", "ramp", "step"};
}

} // namespace dbi
