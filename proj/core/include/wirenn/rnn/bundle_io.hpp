#pragma once

// Bundle file: versioned JSON document.
//
//   {
//     "format": "wirenn-bundle", "version": 1,
//     "hyperparameters": { "window": 8, "n_classes": 6, ... },
//     "tie_order": [0, 1, ...],
//     "thresholds": { "t_conf_raw": [...], "t_esc": 3 },
//     "tables": { "<role>": { "input_width": w, "output_width": o, "values": "<hex>" }, ... },
//     "weights": { ... },          optional, full precision
//     "fallback": { ... }          optional, decision forest
//   }
//
// Table values are concatenated fixed-width lowercase hex, ceil(o/4) digits per
// entry, entry 0 first. Roles: len_embed, ipd_embed, fc, gru_head, gru_body,
// out_tail (empty roles are omitted).

#include <filesystem>
#include <string>

#include "wirenn/rnn/bundle.hpp"

namespace wirenn::rnn {

struct SaveOptions {
  bool include_weights = true;
  int indent = 1;  // < 0 writes a single line
};

std::string serialize_bundle(const ModelBundle& bundle, const SaveOptions& opts = {});
/// stored: use the document's tables. recompile: ignore them and build every
/// table from "weights"; "tables", "tie_order" and "thresholds" become optional.
enum class TableSource { stored, recompile };

/// Throws FormatError on malformed documents; the result is validated.
ModelBundle parse_bundle(const std::string& text, TableSource source = TableSource::stored);

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle, const SaveOptions& opts = {});
ModelBundle load_bundle(const std::filesystem::path& path, TableSource source = TableSource::stored);

/// Hyperparameters in the same JSON shape as the bundle's "hyperparameters"
/// object; absent keys keep their defaults.
std::string serialize_hyperparams(const Hyperparams& h);
Hyperparams parse_hyperparams(const std::string& json_text);

std::string serialize_tree(const tree::TreeModel& model);
tree::TreeModel parse_tree(const std::string& json_text);

}  // namespace wirenn::rnn
