#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include "nifti_writer.hpp"

namespace testsupport {

TempDir::TempDir(const std::string& prefix) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  for (;;) {
    path_ = std::filesystem::temp_directory_path() /
            (prefix + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    if (std::filesystem::create_directories(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

cxr::BinaryMask random_mask(std::size_t w, std::size_t h, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution d(density);
  cxr::BinaryMask m(w, h);
  for (auto& b : m.bits) b = d(rng) ? 1 : 0;
  return m;
}

cxr::BinaryMask random_blob(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> cx(0.3 * w, 0.7 * w), cy(0.3 * h, 0.7 * h), r(3.0, 0.22 * w);
  std::uniform_int_distribution<int> k(1, 3);
  cxr::BinaryMask m(w, h);
  const int parts = k(rng);
  double px = cx(rng), py = cy(rng);
  for (int p = 0; p < parts; ++p) {
    const double rx = r(rng), ry = r(rng);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double dx = (x + 0.5 - px) / rx, dy = (y + 0.5 - py) / ry;
        if (dx * dx + dy * dy <= 1.0) m.set(x, y);
      }
    }
    // Next part overlaps the current one so the union stays connected.
    px += std::uniform_real_distribution<double>(-0.6, 0.6)(rng) * rx;
    py += std::uniform_real_distribution<double>(-0.6, 0.6)(rng) * ry;
  }
  return m;
}

cxr::BinaryMask filled_rect(std::size_t w, std::size_t h, std::size_t x0, std::size_t y0, std::size_t rw,
                            std::size_t rh) {
  cxr::BinaryMask m(w, h);
  for (std::size_t y = y0; y < y0 + rh; ++y) {
    for (std::size_t x = x0; x < x0 + rw; ++x) m.set(x, y);
  }
  return m;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_phantom(const std::filesystem::path& ct, const std::filesystem::path& mask, const PhantomSpec& spec) {
  const int n = spec.size;
  std::vector<std::int16_t> hu(static_cast<std::size_t>(n) * n * n);
  std::vector<std::int16_t> labels(hu.size(), 0);
  const double c = (n - 1) / 2.0;
  for (int z = 0; z < n; ++z) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const std::size_t i = static_cast<std::size_t>(x) + n * (static_cast<std::size_t>(y) + n * z);
        auto inside = [&](double rx, double ry, double rz) {
          const double dx = (x - c) / rx, dy = (y - c) / ry, dz = (z - c) / rz;
          return dx * dx + dy * dy + dz * dz <= 1.0;
        };
        std::int16_t v = -1000;
        if (inside(0.47 * n, 0.40 * n, 0.49 * n)) v = 40;
        if (inside(0.38 * n, 0.28 * n, 0.42 * n)) v = -800;
        for (const auto& l : spec.lesions) {
          const double dx = x - l[0], dy = y - l[1], dz = z - l[2];
          if (dx * dx + dy * dy + dz * dz <= l[3] * l[3]) {
            v = 30;
            labels[i] = 1;
          }
        }
        hu[i] = v;
      }
    }
  }
  write_nifti(ct, int16_volume(n, n, n, hu, spec.spacing));
  NiftiSpec m = int16_volume(n, n, n, {}, spec.spacing);
  m.datatype = 2;
  m.bitpix = 8;
  m.data.assign(labels.begin(), labels.end());
  write_nifti(mask, m);
}

}  // namespace testsupport
