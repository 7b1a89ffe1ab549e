#pragma once

#include <filesystem>

#include "dwrnet/network/mlp.hpp"

namespace dwrnet::nn {

// JSON container: {"format": "dwrnet-mlp", "version": 1, "layer_sizes": [...],
// "activations": [...], "lb": [...], "ub": [...], "theta": [...]}, theta in
// layout order. Doubles are written with round-trip precision.
void save_checkpoint(const Mlp& net, const std::filesystem::path& path);
Mlp load_checkpoint(const std::filesystem::path& path);

std::string checkpoint_json(const Mlp& net);
Mlp checkpoint_from_json(const std::string& text);

}  // namespace dwrnet::nn
