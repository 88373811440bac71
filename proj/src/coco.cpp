#include "cxr/coco.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cxr/error.hpp"
#include "json.hpp"

namespace cxr {
namespace {

using nlohmann::json;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaError, what); }

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) schema(where.empty() ? std::string(key) : where + "." + key);
  return obj.at(key);
}

std::int64_t require_int(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) schema(where + "." + key + " must be an integer");
  return v.get<std::int64_t>();
}

double require_number(const json& v, const std::string& where) {
  if (!v.is_number()) schema(where + " must be a number");
  return v.get<double>();
}

Provenance parse_provenance(const std::string& s, const std::string& where) {
  if (s == "real") return Provenance::RealXray;
  if (s == "projected") return Provenance::CtProjection;
  schema(where + ".provenance must be \"real\" or \"projected\"");
}

Split parse_split(const std::string& s, const std::string& where) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  schema(where + ".split must be \"train\" or \"test\"");
}

}  // namespace

std::string_view to_string(Provenance p) { return p == Provenance::RealXray ? "real" : "projected"; }
std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

std::size_t DatasetManifest::count(Provenance p, Split s) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.provenance == p && e.split == s;
  return n;
}

CocoAnnotation make_annotation(std::int64_t id, std::int64_t image_id, const Polygon& polygon) {
  CocoAnnotation a;
  a.id = id;
  a.image_id = image_id;
  a.segmentation = {polygon};
  a.bbox = bounding_box(polygon);
  a.area = polygon_area(polygon);
  return a;
}

void validate(const CocoDataset& ds) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvariantViolation, what); };
  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < ds.manifest.entries.size(); ++i) {
    const auto& e = ds.manifest.entries[i];
    if (e.image_id != static_cast<std::int64_t>(i + 1)) {
      fail("image ids must be contiguous from 1; entry " + std::to_string(i) + " has id " + std::to_string(e.image_id));
    }
    if (e.width == 0 || e.height == 0) fail("image " + std::to_string(e.image_id) + " has zero size");
    if (e.file_name.empty()) fail("image " + std::to_string(e.image_id) + " has no file name");
    ids.insert(e.image_id);
  }
  std::set<std::int64_t> ann_ids;
  for (const auto& a : ds.annotations) {
    const std::string where = "annotation " + std::to_string(a.id);
    if (!ann_ids.insert(a.id).second) fail(where + " id is duplicated");
    if (!ids.contains(a.image_id)) fail(where + " references unknown image " + std::to_string(a.image_id));
    if (a.category_id != kLesionCategory) fail(where + " has category " + std::to_string(a.category_id));
    if (a.segmentation.empty()) fail(where + " has no polygon");
    for (const auto& p : a.segmentation) {
      if (p.size() < 3) fail(where + " polygon has fewer than 3 vertices");
    }
    if (!(a.area > 0.0)) fail(where + " has nonpositive area");
  }
}

std::string to_coco_json(const CocoDataset& ds) {
  std::ostringstream os;
  os << "{\n  \"info\": {\"seed\": " << ds.manifest.seed << "},\n";
  os << "  \"images\": [";
  for (std::size_t i = 0; i < ds.manifest.entries.size(); ++i) {
    const auto& e = ds.manifest.entries[i];
    os << (i ? ",\n" : "\n") << "    {\"id\": " << e.image_id << ", \"file_name\": " << quoted(e.file_name)
       << ", \"width\": " << e.width << ", \"height\": " << e.height << ", \"provenance\": \""
       << to_string(e.provenance) << "\", \"split\": \"" << to_string(e.split) << "\"}";
  }
  os << (ds.manifest.entries.empty() ? "],\n" : "\n  ],\n");
  os << "  \"annotations\": [";
  for (std::size_t i = 0; i < ds.annotations.size(); ++i) {
    const auto& a = ds.annotations[i];
    os << (i ? ",\n" : "\n") << "    {\"id\": " << a.id << ", \"image_id\": " << a.image_id
       << ", \"category_id\": " << a.category_id << ", \"segmentation\": [";
    for (std::size_t k = 0; k < a.segmentation.size(); ++k) {
      os << (k ? ", [" : "[");
      const auto& poly = a.segmentation[k];
      for (std::size_t v = 0; v < poly.size(); ++v) {
        os << (v ? ", " : "") << fixed6(poly[v].x) << ", " << fixed6(poly[v].y);
      }
      os << "]";
    }
    os << "], \"bbox\": [" << fixed6(a.bbox.x) << ", " << fixed6(a.bbox.y) << ", " << fixed6(a.bbox.w) << ", "
       << fixed6(a.bbox.h) << "], \"area\": " << fixed6(a.area) << ", \"iscrowd\": " << a.iscrowd << "}";
  }
  os << (ds.annotations.empty() ? "],\n" : "\n  ],\n");
  os << "  \"categories\": [\n    {\"id\": " << kLesionCategory << ", \"name\": \"lesion\", \"supercategory\": \"lesion\"}\n  ]\n}\n";
  return os.str();
}

CocoDataset parse_coco(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema(std::string("document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema("document root must be an object");

  CocoDataset ds;
  if (doc.contains("info") && doc["info"].is_object() && doc["info"].contains("seed")) {
    const json& s = doc["info"]["seed"];
    if (!s.is_number_unsigned() && !s.is_number_integer()) schema("info.seed must be an integer");
    ds.manifest.seed = s.get<std::uint64_t>();
  }

  const json& images = require(doc, "images", "");
  if (!images.is_array()) schema("images must be an array");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const json& im = images[i];
    const std::string where = "images[" + std::to_string(i) + "]";
    ManifestEntry e;
    e.image_id = require_int(im, "id", where);
    const json& fname = require(im, "file_name", where);
    if (!fname.is_string()) schema(where + ".file_name must be a string");
    e.file_name = fname.get<std::string>();
    const auto w = require_int(im, "width", where);
    const auto h = require_int(im, "height", where);
    if (w <= 0 || h <= 0) schema(where + " width/height must be positive");
    e.width = static_cast<std::size_t>(w);
    e.height = static_cast<std::size_t>(h);
    if (im.contains("provenance")) {
      if (!im["provenance"].is_string()) schema(where + ".provenance must be a string");
      e.provenance = parse_provenance(im["provenance"].get<std::string>(), where);
    }
    if (im.contains("split")) {
      if (!im["split"].is_string()) schema(where + ".split must be a string");
      e.split = parse_split(im["split"].get<std::string>(), where);
    }
    ds.manifest.entries.push_back(std::move(e));
  }

  const json& anns = require(doc, "annotations", "");
  if (!anns.is_array()) schema("annotations must be an array");
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const json& an = anns[i];
    const std::string where = "annotations[" + std::to_string(i) + "]";
    CocoAnnotation a;
    a.id = require_int(an, "id", where);
    a.image_id = require_int(an, "image_id", where);
    a.category_id = static_cast<int>(require_int(an, "category_id", where));
    if (a.category_id != kLesionCategory) schema(where + ".category_id must be 1 (lesion)");
    const json& seg = require(an, "segmentation", where);
    if (!seg.is_array() || seg.empty()) schema(where + ".segmentation must be a nonempty list of polygons");
    for (std::size_t k = 0; k < seg.size(); ++k) {
      const json& flat = seg[k];
      const std::string sw = where + ".segmentation[" + std::to_string(k) + "]";
      if (!flat.is_array()) schema(sw + " must be a flat coordinate list");
      if (flat.size() % 2 != 0) schema(sw + " has odd length " + std::to_string(flat.size()));
      if (flat.size() < 6) schema(sw + " needs at least 3 vertices");
      Polygon p;
      for (std::size_t v = 0; v < flat.size(); v += 2) {
        p.push_back({require_number(flat[v], sw), require_number(flat[v + 1], sw)});
      }
      a.segmentation.push_back(std::move(p));
    }
    if (an.contains("bbox")) {
      const json& bb = an["bbox"];
      if (!bb.is_array() || bb.size() != 4) schema(where + ".bbox must have 4 numbers");
      a.bbox = {require_number(bb[0], where), require_number(bb[1], where), require_number(bb[2], where),
                require_number(bb[3], where)};
    } else {
      Polygon all;
      for (const auto& p : a.segmentation) all.insert(all.end(), p.begin(), p.end());
      a.bbox = bounding_box(all);
    }
    if (an.contains("area")) {
      a.area = require_number(an["area"], where + ".area");
    } else {
      for (const auto& p : a.segmentation) a.area += polygon_area(p);
    }
    if (an.contains("iscrowd")) a.iscrowd = static_cast<int>(require_int(an, "iscrowd", where));
    ds.annotations.push_back(std::move(a));
  }
  return ds;
}

void export_coco(const CocoDataset& ds, const std::filesystem::path& out_path, bool verify_files) {
  validate(ds);
  if (verify_files) {
    const auto dir = out_path.parent_path();
    for (const auto& e : ds.manifest.entries) {
      if (!std::filesystem::exists(dir / e.file_name)) {
        throw Error(ErrorKind::InvariantViolation,
                    "image " + std::to_string(e.image_id) + " file missing: " + (dir / e.file_name).string());
      }
    }
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + out_path.string());
  out << to_coco_json(ds);
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + out_path.string());
}

CocoDataset import_coco(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_coco(ss.str());
}

void write_manifest_csv(const DatasetManifest& manifest, const std::filesystem::path& out_path) {
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + out_path.string());
  out << "image_id,path,provenance,split\n";
  for (const auto& e : manifest.entries) {
    out << e.image_id << "," << e.file_name << "," << to_string(e.provenance) << "," << to_string(e.split) << "\n";
  }
}

std::vector<Polygon> polygons_for_image(const CocoDataset& ds, std::int64_t image_id) {
  std::vector<Polygon> out;
  for (const auto& a : ds.annotations) {
    if (a.image_id == image_id) out.insert(out.end(), a.segmentation.begin(), a.segmentation.end());
  }
  return out;
}

}  // namespace cxr
