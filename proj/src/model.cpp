#include "signstab/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace signstab {

void DynamicsSpec::validate() const {
  if (n < 1) throw ModelError("system dimension n must be >= 1");
  if (static_cast<int>(f.size()) != n)
    throw ModelError("expected " + std::to_string(n) + " dynamics expressions, got " +
                     std::to_string(f.size()));
  for (int i = 0; i < n; ++i) {
    int m = max_state_index(f[static_cast<std::size_t>(i)]);
    if (m > n)
      throw ModelError("f" + std::to_string(i + 1) + " references x" +
                       std::to_string(m) + " beyond dimension " + std::to_string(n));
  }
  if (modules) {
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (const auto& block : *modules) {
      if (block.empty()) throw ModelError("module partition contains an empty block");
      for (int idx : block) {
        if (idx < 1 || idx > n)
          throw ModelError("module partition index out of range: " + std::to_string(idx));
        if (seen[static_cast<std::size_t>(idx - 1)]++)
          throw ModelError("module partition blocks are not disjoint at x" +
                           std::to_string(idx));
      }
    }
    for (int i = 0; i < n; ++i)
      if (!seen[static_cast<std::size_t>(i)])
        throw ModelError("module partition does not cover x" + std::to_string(i + 1));
  }
}

namespace {

using nlohmann::json;

Region parse_region(const json& j, int n) {
  Region region;
  if (!j.contains("x") || !j["x"].is_array())
    throw ModelError("region: missing \"x\" interval list");
  if (static_cast<int>(j["x"].size()) != n)
    throw ModelError("region: expected " + std::to_string(n) + " x intervals, got " +
                     std::to_string(j["x"].size()));
  for (const auto& iv : j["x"]) {
    if (!iv.is_array() || iv.size() != 2)
      throw ModelError("region: each x entry must be [lo, hi]");
    region.x.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  if (!j.contains("t") || !j["t"].is_array() || j["t"].size() != 2)
    throw ModelError("region: missing \"t\": [lo, hi]");
  region.t = {j["t"][0].get<double>(), j["t"][1].get<double>()};
  try {
    region.validate();
  } catch (const std::invalid_argument& err) {
    throw ModelError(err.what());
  }
  return region;
}

}  // namespace

Model Model::from_json_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ModelError(origin + ": " + err.what());
  }

  Model model;
  try {
    if (!j.contains("n")) throw ModelError("missing \"n\"");
    model.dyn.n = j["n"].get<int>();
    if (model.dyn.n < 1) throw ModelError("\"n\" must be >= 1");

    if (!j.contains("f") || !j["f"].is_array())
      throw ModelError("missing \"f\" expression list");
    for (const auto& fi : j["f"]) {
      if (!fi.is_string()) throw ModelError("\"f\" entries must be strings");
      model.dyn.f.push_back(parse_expression(fi.get<std::string>(), model.dyn.n));
    }

    if (j.contains("modules")) {
      std::vector<std::vector<int>> mods;
      for (const auto& block : j["modules"]) mods.push_back(block.get<std::vector<int>>());
      model.dyn.modules = std::move(mods);
    }

    model.dyn.validate();

    if (!j.contains("region")) throw ModelError("missing \"region\"");
    model.region = parse_region(j["region"], model.dyn.n);

    if (j.contains("delays")) {
      for (const auto& d : j["delays"]) {
        EdgeDelay ed;
        ed.source = d.at("from").get<int>();
        ed.target = d.at("to").get<int>();
        ed.delay = d.at("T").get<double>();
        if (ed.source < 1 || ed.source > model.dyn.n || ed.target < 1 ||
            ed.target > model.dyn.n)
          throw ModelError("delay entry references a node out of range");
        if (ed.delay < 0.0) throw ModelError("delays must be >= 0");
        model.delays.push_back(ed);
      }
    }

    if (j.contains("block_metrics")) {
      if (!model.dyn.modules)
        throw ModelError("\"block_metrics\" requires a \"modules\" partition");
      const auto& mods = *model.dyn.modules;
      if (j["block_metrics"].size() != mods.size())
        throw ModelError("expected one block metric per module");
      for (std::size_t m = 0; m < mods.size(); ++m) {
        const auto& rows = j["block_metrics"][m];
        auto dim = static_cast<Eigen::Index>(mods[m].size());
        if (static_cast<Eigen::Index>(rows.size()) != dim)
          throw ModelError("block metric " + std::to_string(m + 1) +
                           " does not match its module dimension");
        Eigen::MatrixXd M(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r) {
          const auto& row = rows[static_cast<std::size_t>(r)];
          if (static_cast<Eigen::Index>(row.size()) != dim)
            throw ModelError("block metric " + std::to_string(m + 1) + " is not square");
          for (Eigen::Index c = 0; c < dim; ++c)
            M(r, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
        model.block_metrics.push_back(std::move(M));
      }
    }
  } catch (const json::exception& err) {
    throw ModelError(origin + ": " + err.what());
  } catch (const ParseError& err) {
    throw ModelError(origin + ": expression error: " + err.what());
  }
  return model;
}

Model Model::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), path);
}

Expr total_time_derivative(const Expr& e, const DynamicsSpec& dyn) {
  Expr acc = differentiate(e, Variable::time());
  for (int k = 1; k <= dyn.n; ++k) {
    Expr de = simplify(differentiate(e, Variable::state(k)));
    if (de->is_constant(0.0)) continue;
    acc = add(std::move(acc), mul(de, dyn.f[static_cast<std::size_t>(k - 1)]));
  }
  return simplify(acc);
}

bool is_identically_zero(const Expr& e, const Region& region, int samples,
                         std::uint64_t seed, double tol) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  Expr s = simplify(e);
  if (s->is_constant()) return s->value == 0.0;
  for (const SamplePoint& p : sample_region(region, samples, seed)) {
    if (std::abs(evaluate(s, p.x, p.t)) >= tol) return false;
  }
  return true;
}

}  // namespace signstab
