#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cxr/geometry.hpp"
#include "cxr/image.hpp"

namespace cxr {

enum class Split { Train, Test };

std::string_view to_string(Provenance p);  // "real" | "projected"
std::string_view to_string(Split s);       // "train" | "test"

struct ManifestEntry {
  std::int64_t image_id = 0;
  std::string file_name;  // relative to the COCO file's directory
  std::size_t width = 0;
  std::size_t height = 0;
  Provenance provenance = Provenance::RealXray;
  Split split = Split::Train;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::uint64_t seed = 0;

  std::size_t count(Provenance p, Split s) const;
  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

inline constexpr int kLesionCategory = 1;

struct CocoAnnotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  int category_id = kLesionCategory;
  std::vector<Polygon> segmentation;
  BoxF bbox;
  double area = 0.0;
  int iscrowd = 0;
};

struct CocoDataset {
  DatasetManifest manifest;
  std::vector<CocoAnnotation> annotations;
};

/// Annotation for one polygon; bbox and area (shoelace) derived from it.
CocoAnnotation make_annotation(std::int64_t id, std::int64_t image_id, const Polygon& polygon);

/// Throws InvariantViolation naming the offending entry.
void validate(const CocoDataset& ds);

/// Byte-deterministic serialization: fixed key order, 6-decimal floats.
std::string to_coco_json(const CocoDataset& ds);
CocoDataset parse_coco(std::string_view json);

/// Validates, checks that every referenced image exists next to out_path
/// (unless verify_files is false), then writes the document.
void export_coco(const CocoDataset& ds, const std::filesystem::path& out_path, bool verify_files = true);
CocoDataset import_coco(const std::filesystem::path& path);

/// image_id,path,provenance,split
void write_manifest_csv(const DatasetManifest& manifest, const std::filesystem::path& out_path);

std::vector<Polygon> polygons_for_image(const CocoDataset& ds, std::int64_t image_id);

}  // namespace cxr
