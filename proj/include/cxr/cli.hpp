#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cxr/config.hpp"
#include "cxr/coco.hpp"

namespace cxr::cli {

/// Exit status: 0 success, 1 domain error (error name printed), 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

/// CT + mask volume to projection PNG, mask PNG and instance annotations.
struct SynthesizedCase {
  std::string image_file;  // relative to the output directory
  std::string mask_file;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<LesionInstance> instances;
};

SynthesizedCase synthesize_case(const std::filesystem::path& ct_path, const std::filesystem::path& mask_path,
                                const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                                const std::string& stem);

/// File stem with ".nii" / ".nii.gz" removed.
std::string volume_stem(const std::filesystem::path& p);

}  // namespace cxr::cli
