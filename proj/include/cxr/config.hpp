#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "cxr/labeling.hpp"
#include "cxr/projection.hpp"

namespace cxr {

/// Pipeline knobs shared by the CLI subcommands.
///
/// File format: one `key = value` per line, `#` starts a comment, blank
/// lines ignored. Keys:
///
///   window_enabled   true|false          (default true)
///   window_min       HU, < window_max    (default -1024)
///   window_max       HU                  (default 600)
///   mask_min_voxels  integer >= 1        (default 1)
///   connectivity     4|8                 (default 8)
///   min_area         integer >= 0        (default 16)
///   max_instances    integer >= 1        (default 15)
///   simplify_eps     0 <= eps <= 100     (default 1.0)
///   seed             unsigned 64-bit     (default 0)
///   flip_lr          true|false          (default false)
///   flip_si          true|false          (default false)
///   resample         true|false          (default true)
///   out              output directory    (default unset)
///
/// Unknown keys and out-of-range values raise ConfigError.
struct PipelineConfig {
  bool window_enabled = true;
  WindowSpec window;
  int mask_min_voxels = 1;
  LabelingConfig labeling;
  std::uint64_t seed = 0;
  DisplayFlips flips;
  bool resample = true;
  std::filesystem::path out;

  WindowSpec effective_window() const { return window_enabled ? window : WindowSpec::disabled(); }

  /// Sets one key from its textual value.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  /// Resolved key = value lines in a fixed order.
  std::map<std::string, std::string> to_map() const;
  std::string to_text() const;
};

PipelineConfig parse_config_text(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

}  // namespace cxr
