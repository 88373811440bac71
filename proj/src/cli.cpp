#include "cxr/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cxr/assemble.hpp"
#include "cxr/augmentation.hpp"
#include "cxr/error.hpp"
#include "cxr/evaluation.hpp"
#include "cxr/kernels.hpp"
#include "cxr/parallel.hpp"
#include "cxr/raster.hpp"
#include "cxr/rng.hpp"

namespace cxr::cli {
namespace fs = std::filesystem;

std::string volume_stem(const fs::path& p) {
  std::string name = p.filename().string();
  for (const char* ext : {".nii.gz", ".nii"}) {
    const std::string e(ext);
    if (name.size() > e.size() && name.compare(name.size() - e.size(), e.size(), e) == 0) {
      return name.substr(0, name.size() - e.size());
    }
  }
  return p.stem().string();
}

SynthesizedCase synthesize_case(const fs::path& ct_path, const fs::path& mask_path, const PipelineConfig& cfg,
                                const fs::path& out_dir, const std::string& stem) {
  PairedCase pc = pair_mask(read_nifti(ct_path), MaskVolume(read_nifti(mask_path)));
  const Projection2D proj = project_coronal(pc.ct, cfg.effective_window(), cfg.flips);
  Image8 image = normalize_to_8bit(proj);
  BinaryMask mask = project_mask(pc.mask, cfg.mask_min_voxels, cfg.flips);
  if (cfg.resample) {
    image = resample_isotropic(image, proj.pixel_spacing[0], proj.pixel_spacing[1]);
    mask = resample_isotropic(mask, proj.pixel_spacing[0], proj.pixel_spacing[1]);
  }
  SynthesizedCase sc;
  sc.image_file = "images/" + stem + ".png";
  sc.mask_file = "masks/" + stem + ".png";
  sc.width = image.width;
  sc.height = image.height;
  sc.instances = build_annotations(mask, cfg.labeling);
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "masks");
  write_png(out_dir / sc.image_file, image);
  write_mask_png(out_dir / sc.mask_file, mask);
  return sc;
}

namespace {

struct ConfigFlags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

CLI::Option* add_value_flag(CLI::App* app, ConfigFlags& f, const std::string& flag, const std::string& key,
                    const std::string& help) {
  return app->add_option_function<std::string>(flag, [&f, key](const std::string& v) { f.overrides.emplace_back(key, v); },
                                        help);
}

void add_bool_flag(CLI::App* app, ConfigFlags& f, const std::string& flag, const std::string& key,
                   const std::string& value, const std::string& help) {
  app->add_flag_callback(flag, [&f, key, value] { f.overrides.emplace_back(key, value); }, help);
}

void add_config_flags(CLI::App* app, ConfigFlags& f, bool projection, bool labeling) {
  app->add_option("--config", f.config_path, "Flat key = value config file; flags override it");
  if (projection) {
    add_value_flag(app, f, "--window-min", "window_min", "Lower HU clamp before summation");
    add_value_flag(app, f, "--window-max", "window_max", "Upper HU clamp before summation");
    add_bool_flag(app, f, "--no-window", "window_enabled", "false", "Sum raw intensities");
    add_value_flag(app, f, "--mask-min-voxels", "mask_min_voxels", "Lesion voxels per column for a foreground pixel");
    add_bool_flag(app, f, "--flip-lr", "flip_lr", "true", "Mirror the output left-right");
    add_bool_flag(app, f, "--flip-si", "flip_si", "true", "Mirror the output top-bottom");
    add_bool_flag(app, f, "--no-resample", "resample", "false", "Keep the volume's native pixel aspect");
  }
  if (labeling) {
    add_value_flag(app, f, "--connectivity", "connectivity", "4 or 8");
    add_value_flag(app, f, "--min-area", "min_area", "Smallest kept instance, pixels");
    add_value_flag(app, f, "--max-instances", "max_instances", "Largest instances kept per image");
    add_value_flag(app, f, "--simplify-eps", "simplify_eps", "Douglas-Peucker tolerance, pixels");
  }
}

PipelineConfig resolve(const ConfigFlags& f, std::ostream& err, const std::string& command) {
  PipelineConfig cfg;
  if (!f.config_path.empty()) cfg = load_config(f.config_path);
  for (const auto& [k, v] : f.overrides) cfg.set(k, v);
  cfg.validate();
  err << "[ct2cxr] " << command << " kernels=" << kernels::backend_name(kernels::active().backend)
      << " threads=" << thread_count() << "\n";
  for (const auto& [k, v] : cfg.to_map()) err << "[ct2cxr]   " << k << " = " << v << "\n";
  return cfg;
}

CocoDataset synthesized_dataset(const std::vector<SynthesizedCase>& cases, std::uint64_t seed) {
  CocoDataset ds;
  ds.manifest.seed = seed;
  std::int64_t ann_id = 0;
  for (const auto& c : cases) {
    const auto image_id = static_cast<std::int64_t>(ds.manifest.entries.size() + 1);
    ds.manifest.entries.push_back({image_id, c.image_file, c.width, c.height, Provenance::CtProjection, Split::Train});
    for (const auto& inst : c.instances) ds.annotations.push_back(make_annotation(++ann_id, image_id, inst.polygon));
  }
  return ds;
}

int cmd_project(const fs::path& ct, const fs::path& out, const fs::path& mask, const fs::path& mask_out,
                const PipelineConfig& cfg, std::ostream& os) {
  const Volume3D vol = read_nifti(ct);
  const Projection2D proj = project_coronal(vol, cfg.effective_window(), cfg.flips);
  Image8 img = normalize_to_8bit(proj);
  if (cfg.resample) img = resample_isotropic(img, proj.pixel_spacing[0], proj.pixel_spacing[1]);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_png(out, img);
  os << "wrote " << out.string() << " (" << img.width << "x" << img.height << ")\n";
  if (!mask.empty()) {
    const PairedCase pc = pair_mask(vol, MaskVolume(read_nifti(mask)));
    BinaryMask bm = project_mask(pc.mask, cfg.mask_min_voxels, cfg.flips);
    if (cfg.resample) bm = resample_isotropic(bm, proj.pixel_spacing[0], proj.pixel_spacing[1]);
    const fs::path target = mask_out.empty() ? fs::path(out).replace_extension(".mask.png") : mask_out;
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    write_mask_png(target, bm);
    os << "wrote " << target.string() << "\n";
  }
  return 0;
}

int cmd_labelize(const fs::path& mask_png, const fs::path& out, const std::string& image_name,
                 const PipelineConfig& cfg, std::ostream& os) {
  const BinaryMask mask = read_mask_png(mask_png);
  const auto instances = build_annotations(mask, cfg.labeling);
  CocoDataset ds;
  ds.manifest.seed = cfg.seed;
  ds.manifest.entries.push_back({1, image_name.empty() ? mask_png.filename().string() : image_name, mask.width,
                                 mask.height, Provenance::CtProjection, Split::Train});
  std::int64_t id = 0;
  for (const auto& inst : instances) ds.annotations.push_back(make_annotation(++id, 1, inst.polygon));
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  export_coco(ds, out, false);
  os << "wrote " << out.string() << " with " << instances.size() << " instances\n";
  return 0;
}

std::vector<std::pair<fs::path, fs::path>> volume_pairs(const fs::path& ct_dir, const fs::path& mask_dir) {
  std::map<std::string, fs::path> masks;
  for (const auto& e : fs::directory_iterator(mask_dir)) {
    if (e.is_regular_file()) masks[volume_stem(e.path())] = e.path();
  }
  std::vector<std::pair<fs::path, fs::path>> out;
  std::vector<fs::path> cts;
  for (const auto& e : fs::directory_iterator(ct_dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && (name.ends_with(".nii") || name.ends_with(".nii.gz"))) cts.push_back(e.path());
  }
  std::sort(cts.begin(), cts.end());
  for (const auto& ct : cts) {
    const auto it = masks.find(volume_stem(ct));
    if (it == masks.end()) throw Error(ErrorKind::IoFailure, "no mask volume for " + ct.filename().string());
    out.emplace_back(ct, it->second);
  }
  return out;
}

int cmd_synthesize(const fs::path& ct, const fs::path& mask, const fs::path& ct_dir, const fs::path& mask_dir,
                   const PipelineConfig& cfg, std::ostream& os) {
  const fs::path out = cfg.out;
  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (!ct.empty()) {
    pairs.emplace_back(ct, mask);
  } else {
    pairs = volume_pairs(ct_dir, mask_dir);
  }
  std::vector<SynthesizedCase> cases;
  for (const auto& [c, m] : pairs) {
    cases.push_back(synthesize_case(c, m, cfg, out, volume_stem(c)));
    os << volume_stem(c) << ": " << cases.back().width << "x" << cases.back().height << ", "
       << cases.back().instances.size() << " instances\n";
  }
  export_coco(synthesized_dataset(cases, cfg.seed), out / "annotations.json");
  os << "wrote " << (out / "annotations.json").string() << "\n";
  return 0;
}

struct Pool {
  fs::path dir;
  CocoDataset coco;
  std::map<std::string, std::int64_t> id_by_path;
};

Pool load_pool(const fs::path& dir) {
  Pool p{dir, import_coco(dir / "annotations.json"), {}};
  for (const auto& e : p.coco.manifest.entries) p.id_by_path[e.file_name] = e.image_id;
  return p;
}

std::vector<PoolItem> pool_items(const Pool& p) {
  std::vector<PoolItem> items;
  for (const auto& e : p.coco.manifest.entries) items.push_back({e.file_name, e.width, e.height});
  return items;
}

CocoDataset subset(const CocoDataset& all, Split split) {
  CocoDataset out;
  out.manifest.seed = all.manifest.seed;
  std::map<std::int64_t, std::int64_t> remap;
  for (const auto& e : all.manifest.entries) {
    if (e.split != split) continue;
    ManifestEntry c = e;
    c.image_id = static_cast<std::int64_t>(out.manifest.entries.size() + 1);
    remap[e.image_id] = c.image_id;
    out.manifest.entries.push_back(c);
  }
  for (const auto& a : all.annotations) {
    if (const auto it = remap.find(a.image_id); it != remap.end()) {
      CocoAnnotation c = a;
      c.id = static_cast<std::int64_t>(out.annotations.size() + 1);
      c.image_id = it->second;
      out.annotations.push_back(std::move(c));
    }
  }
  return out;
}

int cmd_build_dataset(const std::string& protocol_name, const fs::path& xrays, const fs::path& projections,
                      const PipelineConfig& cfg, std::ostream& os) {
  Protocol protocol;
  if (protocol_name == "dataset1") {
    protocol = Protocol::dataset1();
  } else if (protocol_name == "dataset2") {
    protocol = Protocol::dataset2();
  } else {
    throw Error(ErrorKind::ConfigError, "unknown protocol " + protocol_name);
  }
  const Pool real = load_pool(xrays);
  Pool projected;
  if (!projections.empty()) {
    projected = load_pool(projections);
  } else if (protocol.projected_train > 0) {
    throw Error(ErrorKind::InsufficientPool, "projections: required " + std::to_string(protocol.projected_train) +
                                                 ", available 0");
  }
  const DatasetManifest m = assemble_dataset(pool_items(real), pool_items(projected), protocol, cfg.seed);

  const fs::path out = cfg.out;
  fs::create_directories(out / "images");
  CocoDataset all;
  all.manifest.seed = m.seed;
  for (const auto& e : m.entries) {
    const Pool& pool = e.provenance == Provenance::RealXray ? real : projected;
    const std::int64_t src_id = pool.id_by_path.at(e.file_name);
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%05lld_", static_cast<long long>(e.image_id));
    const std::string dest = "images/" + std::string(prefix) + fs::path(e.file_name).filename().string();
    fs::copy_file(pool.dir / e.file_name, out / dest, fs::copy_options::overwrite_existing);
    ManifestEntry c = e;
    c.file_name = dest;
    all.manifest.entries.push_back(c);
    for (const auto& poly : polygons_for_image(pool.coco, src_id)) {
      all.annotations.push_back(make_annotation(static_cast<std::int64_t>(all.annotations.size() + 1), e.image_id, poly));
    }
  }
  export_coco(all, out / "dataset.json");
  export_coco(subset(all, Split::Train), out / "train.json");
  export_coco(subset(all, Split::Test), out / "test.json");
  write_manifest_csv(all.manifest, out / "manifest.csv");
  os << protocol_name << ": train real " << m.count(Provenance::RealXray, Split::Train) << ", train projected "
     << m.count(Provenance::CtProjection, Split::Train) << ", test " << m.count(Provenance::RealXray, Split::Test)
     << " (seed " << m.seed << ")\n";
  return 0;
}

std::uint64_t copy_seed(std::uint64_t seed, std::size_t copy) { return copy == 0 ? seed : derive_seed(seed, copy); }

Image8 outline(const Image8& img, const std::vector<Polygon>& polys) {
  Image8 out(img.width, img.height, 3);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, img.channels == 3 ? c : 0);
    }
  }
  for (const auto& p : polys) {
    if (p.size() < 3) continue;
    const BinaryMask m = rasterize_polygon(p, img.width, img.height);
    for (std::size_t y = 0; y < m.height; ++y) {
      for (std::size_t x = 0; x < m.width; ++x) {
        if (!m.get(x, y)) continue;
        const bool edge = x == 0 || y == 0 || x + 1 == m.width || y + 1 == m.height || !m.get(x - 1, y) ||
                          !m.get(x + 1, y) || !m.get(x, y - 1) || !m.get(x, y + 1);
        if (edge) {
          out.at(x, y, 0) = 255;
          out.at(x, y, 1) = 0;
          out.at(x, y, 2) = 0;
        }
      }
    }
  }
  return out;
}

int cmd_augment(const fs::path& in, std::size_t copies, bool include_originals, const PipelineConfig& cfg,
                std::ostream& os) {
  const CocoDataset src = import_coco(in);
  const fs::path in_dir = in.parent_path();
  const fs::path out = cfg.out;
  fs::create_directories(out / "images");
  CocoDataset merged;
  merged.manifest.seed = cfg.seed;
  auto add = [&merged](const ManifestEntry& from, const std::string& file, const Image8& img,
                       const std::vector<Polygon>& polys) {
    const auto id = static_cast<std::int64_t>(merged.manifest.entries.size() + 1);
    merged.manifest.entries.push_back({id, file, img.width, img.height, from.provenance, from.split});
    for (const auto& p : polys) {
      merged.annotations.push_back(make_annotation(static_cast<std::int64_t>(merged.annotations.size() + 1), id, p));
    }
  };
  for (const auto& e : src.manifest.entries) {
    const Image8 img = read_png(in_dir / e.file_name);
    const auto polys = polygons_for_image(src, e.image_id);
    const std::string base = fs::path(e.file_name).stem().string();
    if (include_originals) {
      const std::string file = "images/" + std::to_string(e.image_id) + "_" + base + ".png";
      write_png(out / file, img);
      add(e, file, img, polys);
    }
    for (std::size_t k = 0; k < copies; ++k) {
      const auto params = sample_params(copy_seed(cfg.seed, k), e.image_id);
      const AugmentedSample s = apply_augmentation(img, polys, params);
      const std::string file = "images/" + std::to_string(e.image_id) + "_" + base + "_aug" + std::to_string(k) + ".png";
      write_png(out / file, s.image);
      add(e, file, s.image, s.polygons);
    }
  }
  export_coco(merged, out / "augmented.json");
  os << "wrote " << merged.manifest.entries.size() << " images to " << (out / "augmented.json").string() << "\n";
  return 0;
}

int cmd_augment_preview(const fs::path& in, std::int64_t image_id, std::size_t copy, const fs::path& out_png,
                        const PipelineConfig& cfg, std::ostream& os) {
  const CocoDataset src = import_coco(in);
  const auto it = std::find_if(src.manifest.entries.begin(), src.manifest.entries.end(),
                               [image_id](const ManifestEntry& e) { return e.image_id == image_id; });
  if (it == src.manifest.entries.end()) {
    throw Error(ErrorKind::ImageSetMismatch, "image " + std::to_string(image_id) + " not in " + in.string());
  }
  const Image8 img = read_png(in.parent_path() / it->file_name);
  const auto polys = polygons_for_image(src, image_id);
  const auto params = sample_params(copy_seed(cfg.seed, copy), image_id);
  const AugmentedSample s = apply_augmentation(img, polys, params);
  const Image8 left = outline(img, polys);
  const Image8 right = outline(s.image, s.polygons);
  constexpr std::size_t kGap = 4;
  Image8 canvas(left.width + kGap + right.width, std::max(left.height, right.height), 3);
  for (std::size_t y = 0; y < left.height; ++y) {
    for (std::size_t x = 0; x < left.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        canvas.at(x, y, c) = left.at(x, y, c);
        canvas.at(left.width + kGap + x, y, c) = right.at(x, y, c);
      }
    }
  }
  if (out_png.has_parent_path()) fs::create_directories(out_png.parent_path());
  write_png(out_png, canvas);
  os << "wrote " << out_png.string() << "\n";
  return 0;
}

int cmd_evaluate(const fs::path& pred, const fs::path& gt, const fs::path& overlays, double confidence,
                 bool skip_empty, fs::path report_path, std::ostream& os) {
  EvalOptions opts;
  opts.confidence = confidence;
  opts.skip_both_empty = skip_empty;
  if (!overlays.empty()) opts.overlay_dir = overlays;
  const IoUReport r = evaluate_dataset(pred, gt, opts);
  os << format_report_table(r);
  if (report_path.empty()) report_path = pred.parent_path() / "iou_report.json";
  std::ofstream rf(report_path, std::ios::binary);
  if (!rf) throw Error(ErrorKind::IoFailure, "cannot write " + report_path.string());
  rf << report_json(r);
  os << "wrote " << report_path.string() << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"CT volumes to annotated synthetic chest X-rays, dataset assembly and IoU evaluation", "ct2cxr"};
  app.require_subcommand(1);

  ConfigFlags project_flags, labelize_flags, synth_flags, build_flags, augment_flags, preview_flags;

  std::string ct, mask, out_path, mask_out, ct_dir, mask_dir, image_name;
  auto* project = app.add_subcommand("project", "Coronal projection of a CT (and optionally its mask) to PNG");
  project->add_option("--ct", ct, "CT volume (.nii / .nii.gz)")->required();
  project->add_option("--out", out_path, "Projection PNG")->required();
  project->add_option("--mask", mask, "Lesion mask volume");
  project->add_option("--mask-out", mask_out, "Mask projection PNG");
  add_config_flags(project, project_flags, true, false);

  std::string label_mask;
  auto* labelize = app.add_subcommand("labelize", "Binary mask PNG to COCO instance polygons");
  labelize->add_option("--mask", label_mask, "Mask PNG, nonzero is lesion")->required();
  labelize->add_option("--out", out_path, "COCO JSON")->required();
  labelize->add_option("--image", image_name, "file_name recorded for the image");
  add_config_flags(labelize, labelize_flags, false, true);

  auto* synth = app.add_subcommand("synthesize", "CT + mask volumes to projection images and COCO labels");
  auto* ct_opt = synth->add_option("--ct", ct, "CT volume");
  auto* mask_opt = synth->add_option("--mask", mask, "Mask volume paired with --ct");
  auto* ct_dir_opt = synth->add_option("--ct-dir", ct_dir, "Directory of CT volumes");
  auto* mask_dir_opt = synth->add_option("--mask-dir", mask_dir, "Directory of masks with matching file names");
  ct_opt->needs(mask_opt);
  mask_opt->needs(ct_opt);
  ct_dir_opt->needs(mask_dir_opt);
  mask_dir_opt->needs(ct_dir_opt);
  ct_opt->excludes(ct_dir_opt);
  std::string synth_out;
  synth->add_option_function<std::string>(
      "--out", [&synth_flags](const std::string& v) { synth_flags.overrides.emplace_back("out", v); },
      "Output directory")->required();
  add_config_flags(synth, synth_flags, true, true);
  add_value_flag(synth, synth_flags, "--seed", "seed", "Recorded in the COCO info block");

  std::string protocol_name, xrays, projections;
  auto* build = app.add_subcommand("build-dataset", "Assemble Dataset 1 / Dataset 2 with a seeded split");
  build->add_option("--protocol", protocol_name, "dataset1 | dataset2")
      ->required()
      ->check(CLI::IsMember({"dataset1", "dataset2"}));
  build->add_option("--xrays", xrays, "Pool directory with annotations.json of real X-rays")->required();
  build->add_option("--projections", projections, "Pool directory with annotations.json of CT projections");
  add_value_flag(build, build_flags, "--seed", "seed", "RNG seed")->required();
  build->add_option_function<std::string>(
      "--out", [&build_flags](const std::string& v) { build_flags.overrides.emplace_back("out", v); },
      "Output directory")->required();
  build->add_option("--config", build_flags.config_path, "Config file");

  std::string augment_in;
  std::size_t copies = 1;
  bool include_originals = false;
  auto* augment = app.add_subcommand("augment", "Offline seeded augmentation of a COCO dataset");
  augment->require_subcommand(0, 1);
  augment->add_option("--in", augment_in, "Input COCO JSON");
  add_value_flag(augment, augment_flags, "--seed", "seed", "RNG seed");
  augment->add_option("--copies", copies, "Augmented copies per image")->check(CLI::PositiveNumber);
  augment->add_option_function<std::string>(
      "--out", [&augment_flags](const std::string& v) { augment_flags.overrides.emplace_back("out", v); },
      "Output directory");
  augment->add_flag("--include-originals", include_originals, "Also copy the unaugmented images");
  augment->add_option("--config", augment_flags.config_path, "Config file");

  std::string preview_in, preview_out;
  std::int64_t preview_id = 0;
  std::size_t preview_copy = 0;
  auto* preview = augment->add_subcommand("preview", "Side-by-side overlay of one image before and after");
  preview->add_option("--in", preview_in, "Input COCO JSON")->required();
  preview->add_option("--image-id", preview_id, "Image to preview")->required();
  preview->add_option("--copy", preview_copy, "Copy index, as numbered by augment");
  preview->add_option("--out", preview_out, "Output PNG")->required();
  add_value_flag(preview, preview_flags, "--seed", "seed", "RNG seed");
  preview->add_option("--config", preview_flags.config_path, "Config file");

  std::string pred, gt, overlays, report;
  double confidence = 0.95;
  bool skip_empty = false;
  auto* evaluate = app.add_subcommand("evaluate", "Semantic IoU with mean and t-interval margin");
  evaluate->add_option("--pred", pred, "Predicted COCO JSON")->required();
  evaluate->add_option("--gt", gt, "Ground-truth COCO JSON")->required();
  evaluate->add_option("--overlays", overlays, "Directory for per-image overlay PNGs");
  evaluate->add_option("--confidence", confidence, "Interval confidence")->check(CLI::Range(0.5, 0.9999));
  evaluate->add_option("--report", report, "Machine-readable report path (default next to --pred)");
  evaluate->add_flag("--skip-empty", skip_empty, "Skip images where prediction and truth are both empty");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (*synth && ct.empty() && ct_dir.empty()) throw CLI::RequiredError("--ct or --ct-dir");
    if (*augment && !*preview) {
      if (augment_in.empty()) throw CLI::RequiredError("--in");
      if (augment_flags.overrides.empty() ||
          std::none_of(augment_flags.overrides.begin(), augment_flags.overrides.end(),
                       [](const auto& kv) { return kv.first == "out"; })) {
        throw CLI::RequiredError("--out");
      }
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*project) {
      const auto cfg = resolve(project_flags, err, "project");
      return cmd_project(ct, out_path, mask, mask_out, cfg, out);
    }
    if (*labelize) {
      const auto cfg = resolve(labelize_flags, err, "labelize");
      return cmd_labelize(label_mask, out_path, image_name, cfg, out);
    }
    if (*synth) {
      const auto cfg = resolve(synth_flags, err, "synthesize");
      return cmd_synthesize(ct, mask, ct_dir, mask_dir, cfg, out);
    }
    if (*build) {
      const auto cfg = resolve(build_flags, err, "build-dataset");
      return cmd_build_dataset(protocol_name, xrays, projections, cfg, out);
    }
    if (*preview) {
      const auto cfg = resolve(preview_flags, err, "augment preview");
      return cmd_augment_preview(preview_in, preview_id, preview_copy, preview_out, cfg, out);
    }
    if (*augment) {
      const auto cfg = resolve(augment_flags, err, "augment");
      return cmd_augment(augment_in, copies, include_originals, cfg, out);
    }
    if (*evaluate) return cmd_evaluate(pred, gt, overlays, confidence, skip_empty, report, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << error_name(ErrorKind::IoFailure) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace cxr::cli
