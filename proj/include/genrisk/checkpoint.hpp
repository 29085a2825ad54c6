// Weight checkpoint io.
//
// Layout (all integers little-endian uint32, reals little-endian IEEE f64):
//   magic "GRCKPT01"                     8 bytes
//   meta_len, meta bytes                 free-form JSON, may be empty
//   n_params
//   repeated: name_len, name bytes, rows, cols, rows*cols reals (row-major)
#pragma once

#include "genrisk/autodiff.hpp"

#include <string>

#include <utility>
#include <vector>

namespace genrisk::ad {

void save_checkpoint(const ParamStore& params, const std::string& path,
                     const std::string& metadata = "");

// Loads parameters into a fresh store; returns the metadata string.
std::string load_checkpoint(ParamStore& params, const std::string& path);

// Lower-level entry points used when parameters span several stores.
void save_checkpoint_entries(const std::vector<std::pair<std::string, const Mat*>>& entries,
                             const std::string& path, const std::string& metadata);

struct CheckpointData {
    std::string metadata;
    std::vector<std::pair<std::string, Mat>> entries;
};

CheckpointData read_checkpoint(const std::string& path);

}  // namespace genrisk::ad
