#include "dbf/cli/config.hpp"

#include <set>

#include "dbf/error.hpp"

namespace dbf::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(ErrorKind::kParse, "config: '" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) fail(ErrorKind::kParse, "config: unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("config: bad value for '") + key + "': " + e.what());
  }
}

json grids_to_json(const std::map<std::string, std::vector<HyperParams>>& grids) {
  json out = json::object();
  for (const auto& [name, grid] : grids) out[name] = grid;
  return out;
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["input"] = c.input;
  j["output"] = c.output;
  j["plots_dir"] = c.plots_dir;
  j["algorithm"] = c.algorithm;
  j["horizon"] = c.horizon;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["generator"] = {{"dataset", c.generator.dataset}, {"length", c.generator.length}, {"sigma", c.generator.sigma}};
  json model = {{"lag", c.model.lag},           {"kernel", c.model.kernel},   {"s", c.model.s},
                {"window", c.model.window},     {"max_iters", c.model.max_iters}, {"tol", c.model.tol},
                {"lambda1", c.model.lambda1},   {"lambda2", c.model.lambda2}, {"order", c.model.order}};
  model["radius"] = c.model.radius ? json(*c.model.radius) : json(nullptr);
  j["model"] = std::move(model);
  j["protocol"] = {{"algorithms", c.protocol.algorithms}, {"first", c.protocol.first},
                   {"step", c.protocol.step},             {"holdout", c.protocol.holdout},
                   {"horizon", c.protocol.horizon},       {"recursive", c.protocol.recursive},
                   {"grids", grids_to_json(c.protocol.grids)}};
  return j;
}

void merge_json(RunConfig& c, const json& j) {
  check_keys(j, "config",
             {"input", "output", "plots_dir", "algorithm", "horizon", "seed", "threads", "generator", "model",
              "protocol"});
  take(j, "input", c.input);
  take(j, "output", c.output);
  take(j, "plots_dir", c.plots_dir);
  take(j, "algorithm", c.algorithm);
  take(j, "horizon", c.horizon);
  take(j, "seed", c.seed);
  take(j, "threads", c.threads);
  if (j.contains("generator")) {
    const json& g = j.at("generator");
    check_keys(g, "generator", {"dataset", "length", "sigma"});
    take(g, "dataset", c.generator.dataset);
    take(g, "length", c.generator.length);
    take(g, "sigma", c.generator.sigma);
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    check_keys(m, "model", {"lag", "kernel", "radius", "s", "window", "max_iters", "tol", "lambda1", "lambda2", "order"});
    take(m, "lag", c.model.lag);
    take(m, "kernel", c.model.kernel);
    if (m.contains("radius")) {
      if (m.at("radius").is_null()) {
        c.model.radius.reset();
      } else {
        double r = 0.0;
        take(m, "radius", r);
        c.model.radius = r;
      }
    }
    take(m, "s", c.model.s);
    take(m, "window", c.model.window);
    take(m, "max_iters", c.model.max_iters);
    take(m, "tol", c.model.tol);
    take(m, "lambda1", c.model.lambda1);
    take(m, "lambda2", c.model.lambda2);
    take(m, "order", c.model.order);
    if (c.model.order.size() != 3) fail(ErrorKind::kParse, "config: model.order must have three entries");
  }
  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    check_keys(p, "protocol", {"algorithms", "first", "step", "holdout", "horizon", "recursive", "grids"});
    take(p, "algorithms", c.protocol.algorithms);
    take(p, "first", c.protocol.first);
    take(p, "step", c.protocol.step);
    take(p, "holdout", c.protocol.holdout);
    take(p, "horizon", c.protocol.horizon);
    take(p, "recursive", c.protocol.recursive);
    take(p, "grids", c.protocol.grids);
  }
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  merge_json(c, j);
  return c;
}

}  // namespace dbf::cli
