#pragma once

#include <filesystem>
#include <optional>

#include "json.hpp"

#include "pgvar/models.hpp"
#include "pgvar/signal.hpp"

namespace pgvar {

using ordered_json = nlohmann::ordered_json;

struct ModelDocument {
  ModelParams model;
  std::optional<PreprocessTransform> transform;
};

// Coefficient layout in JSON:
//   VAR    coeffs[p][row][col]
//   GVAR   coeffs[set][p][k]
//   PGVAR  coeffs[p][k]
//   GPGVAR coeffs[p][k][l]
// with p running over lags 1..P. Graph entries are paths relative to the
// JSON file.
ordered_json model_to_json(const ModelParams& m, const std::optional<PreprocessTransform>& transform,
                           const std::string& node_graph_ref, const std::string& feature_graph_ref);

// Writes the JSON plus `<stem>.node_graph.csv` / `<stem>.feature_graph.csv`
// next to it when the model has graphs.
void save_model(const ModelDocument& doc, const std::filesystem::path& path);
ModelDocument load_model(const std::filesystem::path& path);

ordered_json transform_to_json(const PreprocessTransform& tr);
PreprocessTransform transform_from_json(const ordered_json& j);

// Coefficient array in the layout above, without graph references.
ordered_json coeffs_to_json(const ModelParams& m);

}  // namespace pgvar
