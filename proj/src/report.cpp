#include "signstab/report.hpp"

#include <sstream>

namespace signstab {

namespace {

using nlohmann::json;

json point_json(const SamplePoint& p) {
  return json{{"x", p.x}, {"t", p.t}};
}

json region_json(const Region& r) {
  json x = json::array();
  for (const auto& iv : r.x) x.push_back({iv[0], iv[1]});
  return json{{"x", x}, {"t", {r.t[0], r.t[1]}}};
}

json cond_i_json(const ConditionIVerdict& v) {
  json pairs = json::array();
  for (const PairVerdict& p : v.pairs) {
    json e{{"i", p.i},
           {"j", p.j},
           {"satisfied", p.ok},
           {"constant", p.constant},
           {"min_ratio", p.min_ratio},
           {"max_residual", p.max_residual}};
    if (p.constant) e["b"] = p.value;
    if (p.witness) {
      e["witness"] = point_json(*p.witness);
      e["reason"] = p.reason;
    }
    pairs.push_back(std::move(e));
  }
  return json{{"satisfied", v.satisfied}, {"pairs", pairs}};
}

json cond_ii_json(const ConditionIIVerdict& v) {
  json nodes = json::array();
  for (const NodeConditionII& n : v.nodes) {
    json e{{"node", n.node},
           {"satisfied", n.ok},
           {"min_alpha", n.min_alpha},
           {"margin", n.worst_margin},
           {"feedback_neighbors", n.neighbors}};
    if (!n.ok) {
      e["witness"] = point_json(n.worst_point);
      e["reason"] = n.reason;
    }
    nodes.push_back(std::move(e));
  }
  return json{{"satisfied", v.satisfied},
              {"corollary1_shortcut", v.corollary1_shortcut},
              {"nodes", nodes}};
}

json chain_json(const ChainReport& cr) {
  json pairs = json::array();
  for (auto [i, j] : cr.chain.pairs) pairs.push_back({i, j});
  json weights = json::array();
  for (const NodeWeight& w : cr.metric.weights) {
    json factors = json::array();
    for (const MetricFactor& f : w.factors) {
      json fe{{"pair", {f.i, f.j}}};
      if (f.constant)
        fe["value"] = f.value;
      else
        fe["expression"] = to_string(f.b);
      factors.push_back(std::move(fe));
    }
    weights.push_back(json{{"node", w.node}, {"factors", factors}});
  }
  json lmi{{"satisfied", cr.lmi.satisfied},
           {"max_eigenvalue", cr.lmi.max_eigenvalue},
           {"max_offdiagonal", cr.lmi.max_offdiag},
           {"diagonal_cancellation", cr.lmi.diagonal_ok}};
  return json{{"nodes", cr.chain.nodes},
              {"root", cr.chain.root},
              {"pairs", pairs},
              {"metric", weights},
              {"lmi", lmi},
              {"condition_ii", cr.condition_ii_ok},
              {"contracting", cr.contracting}};
}

json block_json(const BlockReport& b) {
  json pairs = json::array();
  for (const BlockPairReport& p : b.pairs) {
    json e{{"modules", {p.i, p.j}},
           {"satisfied", p.positive},
           {"constant", p.constant},
           {"max_residual", p.max_residual}};
    if (p.constant) e["b"] = p.value;
    pairs.push_back(std::move(e));
  }
  json modules = json::array();
  for (const BlockModuleReport& m : b.modules)
    modules.push_back(json{{"module", m.module},
                           {"condition_ii", m.condition_ii_ok},
                           {"max_eigenvalue", m.max_eigenvalue}});
  return json{
      {"structure_ok", b.structure_ok},
      {"module_cycles", b.module_cycles},
      {"pairs_ok", b.pairs_ok},
      {"pairs", pairs},
      {"compatibility",
       json{{"satisfied", b.compatibility.satisfied},
            {"max_residual", b.compatibility.max_residual}}},
      {"modules", modules},
      {"chain_lmi_ok", b.chain_lmi_ok},
      {"max_chain_eigenvalue", b.max_chain_eigenvalue},
      {"stable", b.stable}};
}

}  // namespace

json report_to_json(const StabilityReport& report) {
  json j;
  j["schema"] = 1;
  j["n"] = report.n;
  j["region"] = region_json(report.region);
  j["sampling"] = json{{"samples", report.samples}, {"seed", report.seed}};
  j["sign_stable"] = report.sign_stable;
  j["corollary1_shortcut"] = report.corollary1_shortcut;

  json conditions;
  conditions["i"] = cond_i_json(report.cond_i);
  if (report.cond_ii)
    conditions["ii"] = cond_ii_json(*report.cond_ii);
  else
    conditions["ii"] = json{{"satisfied", false}, {"skipped", "condition (i) failed"}};
  json cycles = json::array();
  for (const auto& c : report.long_cycles.cycles) cycles.push_back(c);
  conditions["iii"] = json{{"satisfied", report.cond_iii},
                           {"cycles", cycles},
                           {"truncated", report.long_cycles.truncated}};
  j["conditions"] = std::move(conditions);

  json signs = json::array();
  for (int i = 1; i <= report.n; ++i)
    signs.push_back(to_cstring(report.net.sign_of(i, i)));
  j["self_entries"] = std::move(signs);

  if (report.decomposition) {
    const ChainDecomposition& dec = *report.decomposition;
    json chains = json::array();
    for (const ChainReport& cr : report.chains) chains.push_back(chain_json(cr));
    json singles = json::array();
    for (const SingletonReport& s : report.singletons)
      singles.push_back(json{{"node", s.node}, {"contracting", s.contracting}});
    json edges = json::array();
    for (auto [u, v] : dec.cascade_edges)
      edges.push_back({dec.vertex_name(u), dec.vertex_name(v)});
    j["chains"] = std::move(chains);
    j["singletons"] = std::move(singles);
    j["cascade"] = json{{"edges", edges},
                        {"acyclic", true},
                        {"contracting", report.cascade.contracting},
                        {"failing", report.cascade.failing}};
  }

  if (report.block) j["block"] = block_json(*report.block);
  j["notes"] = report.notes;
  return j;
}

std::string report_to_text(const StabilityReport& report) {
  std::ostringstream os;
  os << "sign-stability analysis (n = " << report.n << ", samples = "
     << report.samples << ", seed = " << report.seed << ")\n";
  os << "verdict: "
     << (report.sign_stable ? "sign-stable on the region"
                            : "not certified sign-stable")
     << "\n";

  os << "condition (i) reciprocal signs: "
     << (report.cond_i.satisfied ? "satisfied" : "VIOLATED") << "\n";
  for (const PairVerdict& p : report.cond_i.pairs) {
    os << "  pair (" << p.i << "," << p.j << "): ";
    if (p.constant)
      os << "b = " << p.value;
    else
      os << "b in [" << p.min_ratio << ", ...]";
    os << (p.ok ? "" : "  <- violated");
    if (!p.reason.empty()) os << " (" << p.reason << ")";
    os << "\n";
  }

  if (report.cond_ii) {
    os << "condition (ii) self-loop dominance: "
       << (report.cond_ii->satisfied ? "satisfied" : "VIOLATED");
    if (report.cond_ii->corollary1_shortcut)
      os << " (constant asymmetries: reduces to alpha_i > 0)";
    os << "\n";
    for (const NodeConditionII& n : report.cond_ii->nodes) {
      os << "  node " << n.node << ": min alpha = " << n.min_alpha
         << ", margin = " << n.worst_margin << (n.ok ? "" : "  <- violated");
      os << "\n";
    }
  } else {
    os << "condition (ii): skipped (condition (i) failed)\n";
  }

  os << "condition (iii) no long cycles: "
     << (report.cond_iii ? "satisfied" : "VIOLATED") << "\n";
  for (const auto& c : report.long_cycles.cycles) {
    os << "  cycle:";
    for (int v : c) os << " " << v;
    os << "\n";
  }
  if (report.long_cycles.truncated) os << "  (cycle list truncated)\n";

  if (report.decomposition) {
    os << "chains:\n";
    for (std::size_t c = 0; c < report.chains.size(); ++c) {
      const ChainReport& cr = report.chains[c];
      os << "  " << report.decomposition->vertex_name(static_cast<int>(c))
         << ": max eig L = " << cr.lmi.max_eigenvalue
         << (cr.contracting ? ", contracting" : ", NOT contracting") << "\n";
    }
    for (const SingletonReport& s : report.singletons)
      os << "  node " << s.node
         << (s.contracting ? ": contracting" : ": NOT contracting") << "\n";
    os << "cascade: "
       << (report.cascade.contracting ? "contracting" : "not contracting")
       << "\n";
  }

  if (report.block) {
    os << "module-level analysis: "
       << (report.block->stable ? "stable" : "not certified") << "\n";
    os << "  compatibility residual = " << report.block->compatibility.max_residual
       << "\n";
  }
  for (const std::string& note : report.notes) os << "note: " << note << "\n";
  return os.str();
}

}  // namespace signstab
