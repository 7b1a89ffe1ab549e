#include "dwrnet/network/checkpoint.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace dwrnet::nn {

std::string checkpoint_json(const Mlp& net) {
  nlohmann::json j;
  j["format"] = "dwrnet-mlp";
  j["version"] = 1;
  j["layer_sizes"] = net.layer_sizes();
  std::vector<std::string> acts;
  for (auto a : net.activations()) acts.push_back(ad::to_string(a));
  j["activations"] = acts;
  j["lb"] = net.lb();
  j["ub"] = net.ub();
  j["theta"] = net.theta();
  return j.dump(1);
}

Mlp checkpoint_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  }
  if (j.value("format", "") != "dwrnet-mlp") throw IoError("checkpoint: not a dwrnet-mlp file");
  try {
    std::vector<Activation> acts;
    for (const auto& a : j.at("activations")) acts.push_back(ad::parse_activation(a.get<std::string>()));
    Mlp net(j.at("layer_sizes").get<std::vector<int>>(), acts, j.at("lb").get<std::vector<double>>(),
            j.at("ub").get<std::vector<double>>());
    net.set_theta(j.at("theta").get<std::vector<double>>());
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << checkpoint_json(net) << '\n';
}

Mlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace dwrnet::nn
