#pragma once

#include <string>

#include "cbs/params.hpp"

namespace cbs {

// Flat binary parameter file: "CBS1" magic, then per entry
//   name_len:u32le, name bytes, rank:u32le, dims:u32le..., data:f64le.
// Round-trips bit-exactly.
void save_params(const ParamSet& params, const std::string& path);
ParamSet load_params(const std::string& path);

}  // namespace cbs
