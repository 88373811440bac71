// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "cxr/assemble.hpp"
#include "cxr/augmentation.hpp"
#include "cxr/cli.hpp"
#include "cxr/coco.hpp"
#include "cxr/evaluation.hpp"
#include "cxr/geometry.hpp"
#include "cxr/labeling.hpp"
#include "cxr/projection.hpp"
#include "cxr/raster.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cxr;
using testsupport::mask_iou;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.ok && budget_s > 0 && secs >= budget_s) {
    o.ok = false;
    o.detail = "runtime over budget";
  }
  std::printf("%s  %-28s %7.3f s%s%s\n", o.ok ? "PASS" : "FAIL", name, secs, o.detail.empty() ? "" : "  ",
              o.detail.c_str());
  std::fflush(stdout);
  failures += !o.ok;
}

AxisRoles random_roles(std::mt19937_64& rng) {
  std::array<AnatomicalAxis, 3> axes{AnatomicalAxis::LeftRight, AnatomicalAxis::AnteriorPosterior,
                                     AnatomicalAxis::SuperiorInferior};
  std::shuffle(axes.begin(), axes.end(), rng);
  AxisRoles r;
  r.role = axes;
  for (auto& d : r.direction) d = (rng() & 1) ? 1 : -1;
  return r;
}

Dims3 random_dims(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> dim(1, 16);
  return {dim(rng), dim(rng), dim(rng)};
}

void projection_oracle(Outcome& o) {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> val(-3000, 3000), lo(-2000, 0), width(1, 2500);
  for (int t = 0; t < 250; ++t) {
    const Dims3 d = random_dims(rng);
    std::vector<std::int16_t> v(d[0] * d[1] * d[2]);
    for (auto& x : v) x = static_cast<std::int16_t>(val(rng));
    const Volume3D vol(d, {1, 1, 1}, std::move(v), random_roles(rng));
    const double l = lo(rng);
    const WindowSpec w{l, l + width(rng)};
    const Projection2D p = project_coronal(vol, w);
    const auto ref = testsupport::oracle_project(vol, w.hu_min, w.hu_max);
    o.require(p.width == ref.width && p.height == ref.height && p.values == ref.values,
              "mismatch on volume " + std::to_string(t));
    double total = 0.0, clamped = 0.0;
    for (double x : p.values) total += x;
    for (std::size_t i = 0; i < vol.size(); ++i) clamped += std::clamp(vol.value(i), w.hu_min, w.hu_max);
    o.require(total == clamped, "mass not conserved on volume " + std::to_string(t));
  }
  o.detail = o.ok ? "250 volumes exact, mass conserved" : o.detail;
}

void mask_projection_oracle(Outcome& o) {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> density(0.01, 0.3);
  for (int t = 0; t < 250; ++t) {
    const Dims3 d = random_dims(rng);
    std::bernoulli_distribution on(density(rng));
    std::vector<std::int16_t> v(d[0] * d[1] * d[2]);
    for (auto& x : v) x = on(rng) ? static_cast<std::int16_t>(1 + (rng() % 3)) : 0;
    const MaskVolume m(Volume3D(d, {1, 1, 1}, std::move(v), random_roles(rng)));
    o.require(project_mask(m, 1) == testsupport::oracle_mask_projection(m.volume(), 1),
              "mismatch on mask " + std::to_string(t));
  }
  o.detail = o.ok ? "250 masks" : o.detail;
}

std::vector<testsupport::PixelSet> partition(const ComponentMap& cm) {
  std::vector<testsupport::PixelSet> out(static_cast<std::size_t>(cm.count));
  for (std::size_t y = 0; y < cm.height; ++y) {
    for (std::size_t x = 0; x < cm.width; ++x) {
      if (const auto l = cm.label(x, y); l > 0) out[static_cast<std::size_t>(l - 1)].insert({x, y});
    }
  }
  return out;
}

void labeling_oracle(Outcome& o) {
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> density(0.05, 0.7);
  for (int t = 0; t < 500; ++t) {
    const BinaryMask m = testsupport::random_mask(64, 64, density(rng), rng);
    for (const auto conn : {Connectivity::Four, Connectivity::Eight}) {
      auto got = partition(connected_components(m, conn));
      auto want = testsupport::bfs_components(m, static_cast<int>(conn));
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      o.require(got == want, "partition differs on mask " + std::to_string(t));
    }
  }
  BinaryMask diag(2, 2);
  diag.set(0, 0);
  diag.set(1, 1);
  const auto c4 = connected_components(diag, Connectivity::Four).count;
  const auto c8 = connected_components(diag, Connectivity::Eight).count;
  o.require(c4 == 2 && c8 == 1, "diagonal pair gave " + std::to_string(c4) + " vs " + std::to_string(c8));
  if (o.ok) o.detail = "500 masks x 2 connectivities; diagonal 2 vs 1";
}

void polygon_fidelity(Outcome& o) {
  std::mt19937_64 rng(1004);
  int checked = 0;
  double worst = 1.0;
  while (checked < 120) {
    const BinaryMask m = testsupport::random_blob(48, 48, rng);
    const ComponentMap cm = connected_components(m);
    for (const auto& s : component_stats(cm)) {
      if (s.pixel_count < 25) continue;
      const Polygon p = extract_polygon(cm, s.id, Connectivity::Eight, 1.0);
      BinaryMask comp(cm.width, cm.height);
      for (std::size_t i = 0; i < cm.labels.size(); ++i) comp.bits[i] = cm.labels[i] == s.id;
      o.require(p.size() >= 3 && is_simple(p), "non-simple polygon for blob " + std::to_string(checked));
      const double v = mask_iou(rasterize_polygon(p, m.width, m.height), comp);
      worst = std::min(worst, v);
      o.require(v >= 0.85, "IoU " + std::to_string(v) + " on blob " + std::to_string(checked));
      ++checked;
    }
  }
  if (o.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d blobs, min IoU %.4f", checked, worst);
    o.detail = buf;
  }
}

std::vector<PoolItem> pool(const std::string& prefix, std::size_t n) {
  std::vector<PoolItem> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({prefix + std::to_string(i) + ".png", 512, 512});
  return out;
}

std::set<std::string> select(const DatasetManifest& m, Provenance p, Split s) {
  std::set<std::string> out;
  for (const auto& e : m.entries) {
    if (e.provenance == p && e.split == s) out.insert(e.file_name);
  }
  return out;
}

void dataset_protocol(Outcome& o) {
  const auto xr = pool("xray_", 100);
  const auto ct = pool("proj_", 120);
  const std::uint64_t seed = 20200704;
  const DatasetManifest d1 = assemble_dataset(xr, ct, Protocol::dataset1(), seed);
  const DatasetManifest d2 = assemble_dataset(xr, ct, Protocol::dataset2(), seed);
  const auto train1 = select(d1, Provenance::RealXray, Split::Train);
  const auto test1 = select(d1, Provenance::RealXray, Split::Test);
  o.require(train1.size() == 60 && test1.size() == 40, "dataset1 is not 60/40");
  std::set<std::string> uni = train1;
  uni.insert(test1.begin(), test1.end());
  o.require(uni.size() == 100, "dataset1 is not a partition of the pool");
  const auto real2 = select(d2, Provenance::RealXray, Split::Train);
  o.require(real2.size() == 10 && d2.count(Provenance::CtProjection, Split::Train) == 50,
            "dataset2 is not 10 real + 50 projected");
  o.require(std::includes(train1.begin(), train1.end(), real2.begin(), real2.end()),
            "dataset2 real images are not a subset of dataset1 training");
  o.require(select(d2, Provenance::RealXray, Split::Test) == test1, "test split differs between protocols");

  auto as_json = [](const DatasetManifest& m) {
    CocoDataset ds;
    ds.manifest = m;
    return to_coco_json(ds);
  };
  o.require(as_json(assemble_dataset(xr, ct, Protocol::dataset1(), seed)) == as_json(d1), "dataset1 not deterministic");
  o.require(as_json(assemble_dataset(xr, ct, Protocol::dataset2(), seed)) == as_json(d2), "dataset2 not deterministic");
  if (o.ok) o.detail = "60/40; 10 of 60 + 50; byte-identical reruns";
}

void coco_round_trip(Outcome& o) {
  testsupport::TempDir dir("cxr-accept");
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> c(1.0, 90.0), r(2.0, 8.0);
  CocoDataset ds;
  ds.manifest.seed = 42;
  std::int64_t ann = 0;
  for (int i = 0; i < 20; ++i) {
    const std::int64_t id = i + 1;
    ds.manifest.entries.push_back({id, "images/case_" + std::to_string(i) + ".png", 100, 100,
                                   i < 12 ? Provenance::RealXray : Provenance::CtProjection,
                                   i < 15 ? Split::Train : Split::Test});
    for (int k = 0; k < i % 4; ++k) {
      const double x = c(rng), y = c(rng), s = r(rng);
      ds.annotations.push_back(make_annotation(++ann, id, {{x, y}, {x + s, y + 0.3}, {x + 0.5 * s, y + s}}));
    }
  }
  export_coco(ds, dir / "a.json", false);
  export_coco(import_coco(dir / "a.json"), dir / "b.json", false);
  const std::string a = testsupport::read_file(dir / "a.json");
  const std::string b = testsupport::read_file(dir / "b.json");
  o.require(!a.empty() && a == b, "re-export differs");
  if (o.ok) o.detail = "20 images, " + std::to_string(ann) + " annotations, " + std::to_string(a.size()) + " bytes";
}

void augmentation(Outcome& o) {
  const int n = 10000;
  int flips = 0, blurs = 0, gains = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_params(31337, i + 1);
    flips += p.flip;
    blurs += p.blur_sigma.has_value();
    gains += p.channel_gains.has_value();
  }
  const double fr = flips / double(n), br = blurs / double(n), gr = gains / double(n);
  o.require(std::abs(fr - 0.5) <= 0.02, "flip rate " + std::to_string(fr));
  o.require(std::abs(br - 0.5) <= 0.02, "blur rate " + std::to_string(br));
  o.require(std::abs(gr - 0.2) <= 0.015, "gain rate " + std::to_string(gr));

  Image8 img(41, 29);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(i * 37);
  const std::vector<Polygon> polys{{{3, 3}, {20, 4}, {12, 19}}};
  const auto id = apply_augmentation(img, polys, AugmentationParams::identity());
  o.require(id.image == img && id.polygons == polys, "identity params changed the sample");

  // Pixel-aligned squares: polygon path vs mask path.
  std::mt19937_64 rng(1006);
  std::uniform_int_distribution<int> half(7, 16), off(-6, 6);
  double worst = 1.0;
  for (int t = 0; t < 60; ++t) {
    const double h = half(rng), cx = 40 + off(rng), cy = 40 + off(rng);
    const Polygon sq{{cx - h, cy - h}, {cx + h, cy - h}, {cx + h, cy + h}, {cx - h, cy + h}};
    auto p = sample_params(2718, t + 1);
    p.blur_sigma.reset();
    p.contrast_alpha = 1.0;
    p.channel_gains.reset();
    const BinaryMask src = rasterize_polygon(sq, 80, 80);
    Image8 as_img(80, 80);
    for (std::size_t i = 0; i < src.bits.size(); ++i) as_img.pixels[i] = src.bits[i] ? 255 : 0;
    const auto a = apply_augmentation(Image8(80, 80), {sq}, p);
    const auto b = apply_augmentation(as_img, {}, p);
    BinaryMask mb(80, 80);
    for (std::size_t i = 0; i < mb.bits.size(); ++i) mb.bits[i] = b.image.pixels[i] >= 128;
    const BinaryMask ma = a.polygons.empty() ? BinaryMask(80, 80) : rasterize_union(a.polygons, 80, 80);
    const double v = mask_iou(ma, mb);
    worst = std::min(worst, v);
    o.require(v >= 0.9, "geometric IoU " + std::to_string(v) + " on fixture " + std::to_string(t));
  }
  if (o.ok) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "flip %.4f blur %.4f gains %.4f; identity exact; 60 squares min IoU %.4f", fr, br,
                  gr, worst);
    o.detail = buf;
  }
}

void statistics(Outcome& o) {
  double worst = 0.0;
  for (int df = 1; df <= 100; ++df) {
    worst = std::max(worst, std::abs(t_critical(0.95, df) - testsupport::t_quantile_oracle(0.975, df)));
  }
  o.require(worst <= 1e-4, "t-quantile off by " + std::to_string(worst));
  o.require(std::abs(t_critical(0.95, 39) - 2.0227) <= 1e-4, "t(0.975, 39) = " + std::to_string(t_critical(0.95, 39)));
  const MeanMargin m = t_margin({1.0, 0.5, 0.0});
  o.require(std::abs(m.mean - 0.5) <= 1e-12, "fixture mean " + std::to_string(m.mean));
  o.require(std::abs(m.margin - 4.3027 * 0.5 / std::sqrt(3.0)) <= 1e-3, "fixture margin " + std::to_string(m.margin));
  o.require(format_mean_margin(0.8056, 0.0266) == "0.8056 ± 0.0266", "format " + format_mean_margin(0.8056, 0.0266));
  o.require(format_mean_margin(0.7937, 0.0291) == "0.7937 ± 0.0291", "format " + format_mean_margin(0.7937, 0.0291));
  if (o.ok) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "max |dt| %.1e over df 1-100; margin %.4f; \"%s\"", worst, m.margin,
                  format_mean_margin(m.mean, m.margin).c_str());
    o.detail = buf;
  }
}

void phantom(Outcome& o) {
  testsupport::TempDir dir("cxr-accept");
  testsupport::write_phantom(dir / "ct.nii.gz", dir / "mask.nii.gz");
  std::ostringstream out, err;
  const std::string out_dir = (dir / "synth").string();
  int code = cli::run({"synthesize", "--ct", (dir / "ct.nii.gz").string(), "--mask", (dir / "mask.nii.gz").string(),
                       "--out", out_dir, "--seed", "1"},
                      out, err);
  o.require(code == 0, "synthesize exit " + std::to_string(code) + ": " + err.str());
  if (!o.ok) return;
  const CocoDataset ds = import_coco(dir / "synth" / "annotations.json");
  o.require(ds.annotations.size() == 2, "instances: " + std::to_string(ds.annotations.size()));

  // Direct projection of the mask volume, independent of the CLI path.
  const BinaryMask direct = project_mask(MaskVolume(read_nifti(dir / "mask.nii.gz")));
  const ComponentMap cm = connected_components(direct);
  double worst = 1.0;
  for (const auto& a : ds.annotations) {
    const BinaryMask r = rasterize_union(a.segmentation, direct.width, direct.height);
    // Match the instance to the component it overlaps most.
    std::vector<std::size_t> hits(static_cast<std::size_t>(cm.count) + 1, 0);
    for (std::size_t i = 0; i < r.bits.size(); ++i) {
      if (r.bits[i]) ++hits[static_cast<std::size_t>(cm.labels[i])];
    }
    const auto best = static_cast<std::int32_t>(std::max_element(hits.begin() + 1, hits.end()) - hits.begin());
    BinaryMask comp(direct.width, direct.height);
    for (std::size_t i = 0; i < comp.bits.size(); ++i) comp.bits[i] = cm.labels[i] == best;
    const double v = mask_iou(r, comp);
    worst = std::min(worst, v);
    o.require(v >= 0.85, "instance IoU " + std::to_string(v));
  }

  std::ostringstream eout, eerr;
  const std::string coco = (dir / "synth" / "annotations.json").string();
  code = cli::run({"evaluate", "--pred", coco, "--gt", coco, "--report", (dir / "report.json").string()}, eout, eerr);
  o.require(code == 0, "evaluate exit " + std::to_string(code));
  const IoUReport rep = evaluate_dataset(coco, coco);
  o.require(rep.mean == 1.0 && rep.margin == 0.0, "self evaluation not 1.0 / 0");
  if (o.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "2 instances, min IoU %.4f; self-eval %s", worst,
                  format_mean_margin(rep.mean, rep.margin).c_str());
    o.detail = buf;
  }
}

}  // namespace

int main() {
  criterion("projection-oracle", 5.0, projection_oracle);
  criterion("mask-projection-oracle", 5.0, mask_projection_oracle);
  criterion("labeling-oracle", 10.0, labeling_oracle);
  criterion("polygon-fidelity", 10.0, polygon_fidelity);
  criterion("dataset-protocol", 0.0, dataset_protocol);
  criterion("coco-round-trip", 0.0, coco_round_trip);
  criterion("augmentation", 30.0, augmentation);
  criterion("statistics", 0.0, statistics);
  criterion("end-to-end-phantom", 10.0, phantom);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
