#include <algorithm>
#include <fstream>
#include <functional>
#include <random>
#include <set>

#include "cxr/assemble.hpp"
#include "cxr/coco.hpp"
#include "cxr/error.hpp"
#include "cxr/raster.hpp"
#include "cxr/rng.hpp"
#include "doctest.h"
#include "json.hpp"
#include "fixtures.hpp"

using namespace cxr;

namespace {

ErrorKind kind_of(const std::function<void()>& f, std::string* msg = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoFailure;
}

// Pixel-center test against the three half-planes of the triangle.
std::size_t triangle_pixels_by_enumeration() {
  std::size_t n = 0;
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      const double cx = x + 0.5, cy = y + 0.5;
      if (cx > 0 && cy > 0 && cx + cy < 4) ++n;
    }
  }
  return n;
}

std::vector<PoolItem> pool(const std::string& prefix, std::size_t n) {
  std::vector<PoolItem> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({prefix + std::to_string(1000 + i) + ".png", 64, 48});
  return out;
}

std::set<std::string> paths(const DatasetManifest& m, Provenance p, Split s) {
  std::set<std::string> out;
  for (const auto& e : m.entries) {
    if (e.provenance == p && e.split == s) out.insert(e.file_name);
  }
  return out;
}

CocoDataset fixture(std::size_t images, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(2.0, 60.0);
  CocoDataset ds;
  ds.manifest.seed = seed;
  std::int64_t ann = 0;
  for (std::size_t i = 0; i < images; ++i) {
    const auto id = static_cast<std::int64_t>(i + 1);
    ds.manifest.entries.push_back({id, "images/img_" + std::to_string(i) + ".png", 64, 64,
                                   i % 3 ? Provenance::RealXray : Provenance::CtProjection,
                                   i % 4 ? Split::Train : Split::Test});
    for (std::size_t k = 0; k < i % 3; ++k) {
      const double x = c(rng), y = c(rng);
      ds.annotations.push_back(make_annotation(++ann, id, {{x, y}, {x + 1.25, y}, {x + 1.25, y + 0.375}, {x, y + 2}}));
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("rasterize examples") {
  const BinaryMask unit = rasterize_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 4, 4);
  CHECK(unit.count() == 1);
  CHECK(unit.get(0, 0));
  CHECK(rasterize_polygon({{1, 1}, {4, 1}, {4, 4}, {1, 4}}, 6, 6).count() == 9);
  const BinaryMask tri = rasterize_polygon({{0, 0}, {4, 0}, {0, 4}}, 4, 4);
  CHECK(tri.count() == triangle_pixels_by_enumeration());
  CHECK(tri.count() == 6);
  CHECK(kind_of([] { rasterize_polygon({{0, 0}, {1, 1}}, 4, 4); }) == ErrorKind::DegeneratePolygon);
}

TEST_CASE("edge pixels follow the top-left rule") {
  // Square with edges through pixel centers: left/top edges include, right/bottom exclude.
  const BinaryMask m = rasterize_polygon({{0.5, 0.5}, {2.5, 0.5}, {2.5, 2.5}, {0.5, 2.5}}, 4, 4);
  CHECK(m.count() == 4);
  CHECK(m.get(0, 0));
  CHECK(m.get(1, 1));
  CHECK_FALSE(m.get(2, 2));
  // Two squares sharing an edge tile without overlap or gap.
  const BinaryMask a = rasterize_polygon({{0, 0.5}, {1.5, 0.5}, {1.5, 3}, {0, 3}}, 4, 4);
  const BinaryMask b = rasterize_polygon({{1.5, 0.5}, {4, 0.5}, {4, 3}, {1.5, 3}}, 4, 4);
  for (std::size_t i = 0; i < 16; ++i) CHECK(a.bits[i] + b.bits[i] == (i / 4 < 3 ? 1 : 0));
}

TEST_CASE("rasterized area within a perimeter of the polygon area") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> r(2.0, 20.0), c(22.0, 42.0), ph(0.0, 6.283);
  for (int t = 0; t < 200; ++t) {
    const double cx = c(rng), cy = c(rng), rad = r(rng), p0 = ph(rng);
    const int k = 3 + t % 10;
    Polygon p;
    for (int i = 0; i < k; ++i) {
      const double a = p0 + 6.283185307179586 * i / k;
      p.push_back({cx + rad * std::cos(a), cy + rad * std::sin(a)});
    }
    const double diff = std::abs(polygon_area(p) - static_cast<double>(rasterize_polygon(p, 64, 64).count()));
    CHECK(diff <= perimeter(p));
  }
}

TEST_CASE("SplitMix64 and FNV-1a reference values") {
  SplitMix64 g(0);
  CHECK(g.next() == 0xe220a8397b1dcdafULL);
  CHECK(g.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(g.next() == 0x06c45d188009454fULL);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(derive_seed(1, "x") != derive_seed(2, "x"));
  CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
  SplitMix64 u(5);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0.0 && x < 1.0));
    CHECK(u.below(7) < 7);
  }
}

TEST_CASE("make_annotation") {
  const CocoAnnotation a = make_annotation(3, 2, {{1, 2}, {5, 2}, {5, 5}, {1, 5}});
  CHECK(a.area == 12.0);
  CHECK(a.bbox.x == 1.0);
  CHECK(a.bbox.y == 2.0);
  CHECK(a.bbox.w == 4.0);
  CHECK(a.bbox.h == 3.0);
  CHECK(a.category_id == 1);
  CHECK(a.iscrowd == 0);
}

TEST_CASE("export format") {
  SUBCASE("empty dataset") {
    const std::string s = to_coco_json({});
    const auto doc = nlohmann::json::parse(s);
    CHECK(doc["images"].empty());
    CHECK(doc["annotations"].empty());
    REQUIRE(doc["categories"].size() == 1);
    CHECK(doc["categories"][0]["id"] == 1);
    CHECK(doc["categories"][0]["name"] == "lesion");
    CHECK(s.find("\"images\"") < s.find("\"annotations\""));
    CHECK(s.find("\"annotations\"") < s.find("\"categories\""));
  }
  SUBCASE("one square") {
    CocoDataset ds;
    ds.manifest.entries.push_back({1, "a.png", 10, 10, Provenance::RealXray, Split::Train});
    ds.annotations.push_back(make_annotation(1, 1, {{2, 3}, {6, 3}, {6, 7}, {2, 7}}));
    const std::string s = to_coco_json(ds);
    const auto doc = nlohmann::json::parse(s);
    const auto& a = doc["annotations"][0];
    REQUIRE(a["segmentation"].size() == 1);
    CHECK(a["segmentation"][0].size() == 8);
    CHECK(a["bbox"] == nlohmann::json::array({2.0, 3.0, 4.0, 4.0}));
    CHECK(a["area"] == 16.0);
    CHECK(s.find("16.000000") != std::string::npos);
    CHECK(to_coco_json(ds) == s);
  }
}

TEST_CASE("COCO round trip is byte identical") {
  testsupport::TempDir dir;
  const CocoDataset ds = fixture(20, 77);
  export_coco(ds, dir / "a.json", false);
  const CocoDataset back = import_coco(dir / "a.json");
  CHECK(back.manifest == ds.manifest);
  REQUIRE(back.annotations.size() == ds.annotations.size());
  export_coco(back, dir / "b.json", false);
  CHECK(testsupport::read_file(dir / "a.json") == testsupport::read_file(dir / "b.json"));
}

TEST_CASE("import rejects schema violations") {
  std::string msg;
  CHECK(kind_of([] { parse_coco(R"({"annotations": [], "categories": []})"); }, &msg) == ErrorKind::SchemaError);
  CHECK(msg.find("images") != std::string::npos);

  const char* odd = R"({"images": [{"id": 1, "file_name": "a.png", "width": 4, "height": 4}],
    "annotations": [{"id": 9, "image_id": 1, "category_id": 1, "segmentation": [[0, 0, 1, 0, 1]],
                     "bbox": [0, 0, 1, 1], "area": 1, "iscrowd": 0}], "categories": []})";
  CHECK(kind_of([&] { parse_coco(odd); }, &msg) == ErrorKind::SchemaError);
  CHECK(msg.find("odd length") != std::string::npos);

  CHECK(kind_of([] { parse_coco("[1, 2"); }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { parse_coco(R"({"images": {}, "annotations": []})"); }) == ErrorKind::SchemaError);
}

TEST_CASE("import tolerates unknown keys") {
  const char* doc = R"({"images": [{"id": 1, "file_name": "a.png", "width": 4, "height": 4, "license": 3}],
    "annotations": [], "categories": [{"id": 1, "name": "lesion"}], "licenses": []})";
  const CocoDataset ds = parse_coco(doc);
  CHECK(ds.manifest.entries.size() == 1);
}

TEST_CASE("export validates invariants and referenced files") {
  testsupport::TempDir dir;
  CocoDataset ds = fixture(3, 1);
  CHECK(kind_of([&] { export_coco(ds, dir / "x.json"); }) == ErrorKind::InvariantViolation);
  ds.manifest.entries[1].image_id = 7;
  CHECK(kind_of([&] { export_coco(ds, dir / "x.json", false); }) == ErrorKind::InvariantViolation);
  CHECK(kind_of([&] { export_coco(fixture(2, 1), "/nonexistent/dir/x.json", false); }) == ErrorKind::IoFailure);
}

TEST_CASE("manifest CSV sidecar") {
  testsupport::TempDir dir;
  write_manifest_csv(fixture(2, 3).manifest, dir / "m.csv");
  const std::string s = testsupport::read_file(dir / "m.csv");
  CHECK(s.rfind("image_id,path,provenance,split\n", 0) == 0);
  CHECK(s.find("1,images/img_0.png,projected,test\n") != std::string::npos);
  CHECK(s.find("2,images/img_1.png,real,train\n") != std::string::npos);
}

TEST_CASE("dataset1 partitions the pool 60/40") {
  const auto xr = pool("xr_", 100);
  const DatasetManifest m = assemble_dataset(xr, {}, Protocol::dataset1(), 42);
  CHECK(m.count(Provenance::RealXray, Split::Train) == 60);
  CHECK(m.count(Provenance::RealXray, Split::Test) == 40);
  CHECK(m.count(Provenance::CtProjection, Split::Train) == 0);
  const auto train = paths(m, Provenance::RealXray, Split::Train);
  const auto test = paths(m, Provenance::RealXray, Split::Test);
  std::set<std::string> all;
  for (const auto& p : xr) all.insert(p.path);
  std::set<std::string> uni = train;
  uni.insert(test.begin(), test.end());
  CHECK(uni == all);
  CHECK(train.size() + test.size() == all.size());
  for (std::size_t i = 0; i < m.entries.size(); ++i) CHECK(m.entries[i].image_id == static_cast<std::int64_t>(i + 1));
}

TEST_CASE("dataset2 draws 10 of the dataset1 selection plus 50 projections") {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xdeadbeefULL}) {
    const auto xr = pool("xr_", 100);
    const auto pr = pool("ct_", 80);
    const DatasetManifest d1 = assemble_dataset(xr, pr, Protocol::dataset1(), seed);
    const DatasetManifest d2 = assemble_dataset(xr, pr, Protocol::dataset2(), seed);
    CHECK(d2.count(Provenance::RealXray, Split::Train) == 10);
    CHECK(d2.count(Provenance::CtProjection, Split::Train) == 50);
    CHECK(d2.count(Provenance::RealXray, Split::Test) == 40);
    const auto sel = paths(d1, Provenance::RealXray, Split::Train);
    for (const auto& p : paths(d2, Provenance::RealXray, Split::Train)) CHECK(sel.count(p) == 1);
    CHECK(paths(d2, Provenance::RealXray, Split::Test) == paths(d1, Provenance::RealXray, Split::Test));
  }
}

TEST_CASE("assembly is deterministic and independent of pool order") {
  auto xr = pool("xr_", 100);
  const DatasetManifest a = assemble_dataset(xr, pool("ct_", 60), Protocol::dataset2(), 9);
  std::reverse(xr.begin(), xr.end());
  const DatasetManifest b = assemble_dataset(xr, pool("ct_", 60), Protocol::dataset2(), 9);
  CHECK(a == b);
  const DatasetManifest c = assemble_dataset(xr, pool("ct_", 60), Protocol::dataset2(), 10);
  CHECK_FALSE(a == c);
}

TEST_CASE("insufficient pools") {
  std::string msg;
  CHECK(kind_of([&] { assemble_dataset(pool("xr_", 100), pool("ct_", 49), Protocol::dataset2(), 1); }, &msg) ==
        ErrorKind::InsufficientPool);
  CHECK(msg.find("required 50, available 49") != std::string::npos);
  CHECK(kind_of([&] { assemble_dataset(pool("xr_", 59), {}, Protocol::dataset1(), 1); }, &msg) ==
        ErrorKind::InsufficientPool);
  CHECK(msg.find("required 60, available 59") != std::string::npos);
}
