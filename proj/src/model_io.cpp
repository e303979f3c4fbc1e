#include "pgvar/model_io.hpp"

#include <fstream>

#include "pgvar/error.hpp"

namespace pgvar {

ordered_json transform_to_json(const PreprocessTransform& tr) {
  ordered_json j;
  j["mean"] = std::vector<double>(tr.mean.data(), tr.mean.data() + tr.mean.size());
  j["scale"] = tr.scale;
  return j;
}

PreprocessTransform transform_from_json(const ordered_json& j) {
  PreprocessTransform tr;
  const auto mean = j.at("mean").get<std::vector<double>>();
  tr.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  tr.scale = j.at("scale").get<double>();
  require(tr.scale > 0.0, ErrorCode::format_error, "transform scale must be positive");
  return tr;
}

ordered_json coeffs_to_json(const ModelParams& m) {
  const auto& s = m.structure;
  ordered_json out = ordered_json::array();
  if (s.family == Family::VAR) {
    for (const auto& a : m.var_lags) {
      ordered_json rows = ordered_json::array();
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        std::vector<double> row(a.cols());
        for (Eigen::Index c = 0; c < a.cols(); ++c) row[c] = a(r, c);
        rows.push_back(row);
      }
      out.push_back(rows);
    }
    return out;
  }
  auto per_lag = [&](int set) {
    ordered_json lags = ordered_json::array();
    for (int p = 1; p <= s.lag_order; ++p) {
      ordered_json ks = ordered_json::array();
      for (int k = 0; k <= s.node_order; ++k) {
        if (s.family == Family::GPGVAR) {
          std::vector<double> ls(s.feature_order + 1);
          for (int l = 0; l <= s.feature_order; ++l) ls[l] = m.coeff(p, k, l);
          ks.push_back(ls);
        } else {
          ks.push_back(m.coeff(p, k, 0, set));
        }
      }
      lags.push_back(ks);
    }
    return lags;
  };
  if (s.family == Family::GVAR) {
    for (int set = 0; set < s.coefficient_sets(); ++set) out.push_back(per_lag(set));
    return out;
  }
  return per_lag(0);
}

ordered_json model_to_json(const ModelParams& m, const std::optional<PreprocessTransform>& transform,
                           const std::string& node_graph_ref, const std::string& feature_graph_ref) {
  const auto& s = m.structure;
  ordered_json j;
  j["family"] = std::string(to_string(s.family));
  j["P"] = s.lag_order;
  j["K"] = s.node_order;
  j["L"] = s.feature_order;
  j["n_nodes"] = s.n_nodes;
  j["n_features"] = s.n_features;
  if (s.family == Family::GVAR) j["channels"] = std::string(to_string(s.channels));
  if (s.family == Family::PGVAR) {
    ordered_json prod;
    prod["kind"] = std::string(to_string(s.product->kind()));
    ordered_json terms = ordered_json::array();
    for (const auto& t : s.product->terms()) {
      ordered_json term;
      term["i"] = t.node_power;
      term["j"] = t.feature_power;
      term["s"] = t.weight;
      terms.push_back(term);
    }
    prod["terms"] = terms;
    j["product"] = prod;
  }
  j["coeffs"] = coeffs_to_json(m);
  ordered_json graphs;
  graphs["node"] = node_graph_ref.empty() ? ordered_json(nullptr) : ordered_json(node_graph_ref);
  graphs["feature"] = feature_graph_ref.empty() ? ordered_json(nullptr) : ordered_json(feature_graph_ref);
  j["graphs"] = graphs;
  j["preprocess"] = transform ? transform_to_json(*transform) : ordered_json(nullptr);
  return j;
}

void save_model(const ModelDocument& doc, const std::filesystem::path& path) {
  const auto& s = doc.model.structure;
  const auto dir = path.parent_path();
  const auto stem = path.stem().string();
  std::string node_ref, feature_ref;
  if (s.node_graph) {
    node_ref = stem + ".node_graph.csv";
    save_edge_list(*s.node_graph, dir / node_ref);
  }
  if (s.feature_graph) {
    feature_ref = stem + ".feature_graph.csv";
    save_edge_list(*s.feature_graph, dir / feature_ref);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::io_error, "cannot write " + path.string());
  out << model_to_json(doc.model, doc.transform, node_ref, feature_ref).dump(2) << '\n';
}

ModelDocument load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error, "cannot open " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format_error, path.string() + ": " + e.what());
  }

  try {
    const auto family = parse_family(j.at("family").get<std::string>());
    const int P = j.at("P").get<int>();
    const int K = j.at("K").get<int>();
    const int L = j.at("L").get<int>();
    const int N = j.at("n_nodes").get<int>();
    const int F = j.at("n_features").get<int>();
    const auto dir = path.parent_path();
    auto graph_at = [&](const char* key, int n) -> std::shared_ptr<const Graph> {
      const auto& ref = j.at("graphs").at(key);
      if (ref.is_null()) return nullptr;
      return std::make_shared<const Graph>(load_edge_list(dir / ref.get<std::string>(), n));
    };

    ModelStructure s;
    switch (family) {
      case Family::VAR: s = ModelStructure::var(N, F, P); break;
      case Family::GVAR:
        s = ModelStructure::gvar(graph_at("node", N), F, P, K, parse_channel_mode(j.at("channels").get<std::string>()));
        break;
      case Family::PGVAR: {
        const auto& prod = j.at("product");
        std::vector<ProductTerm> terms;
        for (const auto& t : prod.at("terms"))
          terms.push_back({t.at("i").get<int>(), t.at("j").get<int>(), t.at("s").get<double>()});
        ProductShiftOperator op(graph_at("node", N), graph_at("feature", F),
                                parse_product_kind(prod.at("kind").get<std::string>()), std::move(terms));
        s = ModelStructure::pgvar(op, P, K);
        break;
      }
      case Family::GPGVAR: s = ModelStructure::gpgvar(graph_at("node", N), graph_at("feature", F), P, K, L); break;
    }

    ModelDocument doc{ModelParams::zeros(s), std::nullopt};
    auto& m = doc.model;
    const auto& c = j.at("coeffs");
    if (family == Family::VAR) {
      for (int p = 0; p < P; ++p)
        for (Eigen::Index r = 0; r < s.dimension(); ++r)
          for (Eigen::Index col = 0; col < s.dimension(); ++col)
            m.var_lags[p](r, col) = c.at(p).at(r).at(col).get<double>();
    } else {
      for (int set = 0; set < s.coefficient_sets(); ++set) {
        const auto& lags = family == Family::GVAR ? c.at(set) : c;
        for (int p = 1; p <= P; ++p)
          for (int k = 0; k <= K; ++k)
            for (int l = 0; l <= s.feature_order; ++l)
              m.coeff(p, k, l, set) = family == Family::GPGVAR ? lags.at(p - 1).at(k).at(l).get<double>()
                                                               : lags.at(p - 1).at(k).get<double>();
      }
    }
    m.validate();
    if (!j.at("preprocess").is_null()) doc.transform = transform_from_json(j.at("preprocess"));
    return doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format_error, path.string() + ": " + e.what());
  }
}

}  // namespace pgvar
