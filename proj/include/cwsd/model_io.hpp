#pragma once

// Binary model file:
//
//   CWSD1\n
//   vocab <V>\n
//   dim <D>\n
//   kernels <k>:<n_k> ...\n          ascending k
//   tags <T>\n
//   mask <0|1>\n
//   <V-2 lines, one UTF-8 character each, in index order from 2>
//   <payload: little-endian float64 arrays>
//
// Payload order: embedding, conv weights (ascending k), conv biases
// (ascending k), projection W (F x T), projection b, transitions A (row-major),
// start scores, classifier weights u, classifier bias c. Matrices are
// row-major.

#include <filesystem>
#include <string>

#include "cwsd/model.hpp"

namespace cwsd {

std::string serialize_model(const Model& model);

// Validates magic, header arithmetic and exact payload length before building
// anything; throws Error(kFormat) with the byte offset on any problem.
Model deserialize_model(const std::string& bytes);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace cwsd
