#pragma once

// nlohmann::json conversions shared by the bundle and config readers. Private
// to the library so the public headers stay free of the JSON dependency.

#include <json.hpp>

#include "wirenn/rnn/bundle.hpp"

namespace wirenn::rnn::detail {

using json = nlohmann::json;

json hyper_to_json(const Hyperparams& h);
/// Starts from `base` and overrides the keys present in `j`.
Hyperparams hyper_from_json(const json& j, Hyperparams base = {});

json tree_to_json(const tree::TreeModel& m);
tree::TreeModel tree_from_json(const json& j);

json weights_to_json(const ModelWeights& w);
ModelWeights weights_from_json(const json& j);

}  // namespace wirenn::rnn::detail
