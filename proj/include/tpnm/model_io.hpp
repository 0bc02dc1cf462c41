#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "tpnm/errors.hpp"
#include "tpnm/trainer.hpp"

namespace tpnm {

constexpr int kModelSchemaVersion = 1;

/// Serializes a trained model as self-describing JSON. Doubles are written
/// in shortest round-trip form, so save/load is bit-exact.
inline nlohmann::ordered_json model_to_json(const FactorModel& model) {
  nlohmann::ordered_json j;
  j["schema_version"] = kModelSchemaVersion;
  j["scheme"] = to_string(model.scheme);

  const Hyperparams& hp = model.hyperparams;
  j["hyperparams"] = {{"alpha", hp.alpha},   {"lambda", hp.lambda0},
                      {"beta", hp.beta},     {"gamma", hp.gamma},
                      {"M", hp.max_iterations}, {"k", hp.latent_dim},
                      {"seed", hp.seed}};

  auto& catalog = j["catalog"] = nlohmann::ordered_json::array();
  for (const auto& node : model.catalog.nodes())
    catalog.push_back({{"id", node.id},
                       {"label", node.label},
                       {"revisitable", node.revisitable}});

  j["n"] = model.n();
  j["k"] = model.k();
  auto& u = j["U"] = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < model.U.rows(); ++i)
    for (Eigen::Index c = 0; c < model.U.cols(); ++c) u.push_back(model.U(i, c));
  auto& v = j["V"] = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < model.V.rows(); ++i)
    for (Eigen::Index c = 0; c < model.V.cols(); ++c) v.push_back(model.V(i, c));
  return j;
}

inline FactorModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion)
      throw ParseError("unsupported model schema version");

    FactorModel model;
    model.scheme = scheme_from_string(j.at("scheme").get<std::string>());

    const auto& hp = j.at("hyperparams");
    model.hyperparams.alpha = hp.at("alpha").get<int>();
    model.hyperparams.lambda0 = hp.at("lambda").get<double>();
    model.hyperparams.beta = hp.at("beta").get<double>();
    model.hyperparams.gamma = hp.at("gamma").get<double>();
    model.hyperparams.max_iterations = hp.at("M").get<int>();
    model.hyperparams.latent_dim = hp.at("k").get<int>();
    model.hyperparams.seed = hp.at("seed").get<std::uint64_t>();

    std::vector<NodeInfo> nodes;
    for (const auto& entry : j.at("catalog"))
      nodes.push_back(NodeInfo{entry.at("id").get<NodeId>(),
                               entry.at("label").get<std::string>(),
                               entry.at("revisitable").get<bool>()});
    model.catalog = NodeCatalog(std::move(nodes));

    const auto n = j.at("n").get<Eigen::Index>();
    const auto k = j.at("k").get<Eigen::Index>();
    const auto& u = j.at("U");
    const auto& v = j.at("V");
    if (static_cast<Eigen::Index>(u.size()) != n * k ||
        static_cast<Eigen::Index>(v.size()) != n * k)
      throw ParseError("factor matrix payload size mismatch");
    model.U.resize(n, k);
    model.V.resize(n, k);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < k; ++c) model.U(i, c) = u[idx++].get<double>();
    idx = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < k; ++c) model.V(i, c) = v[idx++].get<double>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const FactorModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << model_to_json(model).dump(1) << '\n';
}

inline FactorModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid model JSON: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace tpnm
