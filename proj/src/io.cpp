#include "cbond/io.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cbond {

namespace {
const char* kParamKeys[] = {"r", "q", "sigma", "lambda", "c", "K", "gamma"};
}

ModelParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("parameter config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : kParamKeys) known = known || it.key() == key;
    if (!known) throw DomainError("unknown parameter key '" + it.key() + "'");
  }
  std::ostringstream missing;
  for (const char* key : kParamKeys) {
    if (!j.contains(key) || !j.at(key).is_number()) {
      if (missing.tellp() > 0) missing << ", ";
      missing << key;
    }
  }
  if (missing.tellp() > 0)
    throw DomainError("missing or non-numeric parameter key(s): " + missing.str());

  ModelParams p;
  p.r = j.at("r").get<double>();
  p.q = j.at("q").get<double>();
  p.sigma = j.at("sigma").get<double>();
  p.lambda = j.at("lambda").get<double>();
  p.c = j.at("c").get<double>();
  p.K = j.at("K").get<double>();
  p.gamma = j.at("gamma").get<double>();
  return validate_params(p);
}

ModelParams params_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return params_from_json(j);
}

nlohmann::json params_to_json(const ModelParams& p) {
  return {{"r", p.r},     {"q", p.q}, {"sigma", p.sigma}, {"lambda", p.lambda},
          {"c", p.c},     {"K", p.K}, {"gamma", p.gamma}};
}

nlohmann::json solution_to_json(const AnalyticSolution& sol) {
  return {
      {"params", params_to_json(sol.params)},
      {"regime", to_string(sol.regime)},
      {"sbar", sol.sbar},
      {"u_upper", sol.u_upper},
      {"lower_intercept", sol.l_lower.intercept},
      {"lower_slope", sol.l_lower.slope},
      {"alpha_plus", sol.exps.alpha_plus},
      {"beta_plus", sol.exps.beta_plus},
      {"beta_minus", sol.exps.beta_minus},
      {"coeff_A", sol.coeff_A},
      {"coeff_B_plus", sol.coeff_B_plus},
      {"coeff_B_minus", sol.coeff_B_minus},
      {"x_star", sol.x_star},
      {"upper_piece_empty", sol.upper_piece_empty},
  };
}

AnalyticSolution solution_from_json(const nlohmann::json& j) {
  const ModelParams p = params_from_json(j.at("params"));
  const double x_star = j.at("x_star").get<double>();
  AnalyticSolution sol = build_constrained_solution(p, x_star);
  if (to_string(sol.regime) != j.at("regime").get<std::string>())
    throw DomainError("solution_from_json: stored regime does not match the parameters");
  return sol;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw DomainError("short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DomainError("cannot rename temporary file onto '" + path + "'");
  }
}

std::string fmt_csv(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace cbond
