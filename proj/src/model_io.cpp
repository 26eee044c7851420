#include "dynkin/model_io.hpp"

#include <fstream>
#include <sstream>

namespace dynkin {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelFormat(where + ": missing \"" + key + "\"");
  return *it;
}

std::int64_t as_int(const json& v, const char* key, const std::string& where) {
  if (!v.is_number_integer()) {
    throw ModelFormat(where + ": \"" + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

double as_number(const json& v, const char* key, const std::string& where) {
  if (!v.is_number()) throw ModelFormat(where + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace

GameModel parse_model(const json& doc) {
  if (!doc.is_object()) throw ModelFormat("model must be a JSON object");
  const json& nodes = field(doc, "nodes", "model");
  if (!nodes.is_array()) throw ModelFormat("model: \"nodes\" must be an array");

  TreeDescription desc;
  desc.horizon = static_cast<int>(as_int(field(doc, "horizon", "model"), "horizon", "model"));
  std::vector<double> xi_raw, zeta_raw;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& n = nodes[i];
    const std::string where = "nodes[" + std::to_string(i) + "]";
    if (!n.is_object()) throw ModelFormat(where + " must be an object");
    RawNode raw;
    raw.id = as_int(field(n, "id", where), "id", where);
    raw.time = static_cast<int>(as_int(field(n, "time", where), "time", where));
    const json& parent = field(n, "parent", where);
    if (!parent.is_null()) raw.parent = as_int(parent, "parent", where);
    raw.cond_prob = as_number(field(n, "cond_prob", where), "cond_prob", where);
    xi_raw.push_back(as_number(field(n, "xi", where), "xi", where));
    zeta_raw.push_back(as_number(field(n, "zeta", where), "zeta", where));
    desc.nodes.push_back(raw);
  }

  GameModel model;
  model.tree = make_tree(desc);
  std::vector<double> xi(desc.nodes.size()), zeta(desc.nodes.size());
  for (std::size_t i = 0; i < desc.nodes.size(); ++i) {
    const NodeId n = model.tree->index_of(desc.nodes[i].id);
    xi[n] = xi_raw[i];
    zeta[n] = zeta_raw[i];
  }
  model.xi = Family(model.tree, std::move(xi));
  model.zeta = Family(model.tree, std::move(zeta));
  return model;
}

GameModel parse_model_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelFormat(std::string("JSON parse error: ") + e.what());
  }
  return parse_model(doc);
}

GameModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormat("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_model_text(buf.str());
  } catch (const ModelFormat& e) {
    throw ModelFormat(path.string() + ": " + e.what());
  }
}

json model_to_json(const GameModel& model) {
  const EventTree& t = *model.tree;
  json nodes = json::array();
  for (NodeId n = 0; n < t.size(); ++n) {
    const Node& node = t.node(n);
    nodes.push_back({
        {"id", t.external_id(n)},
        {"time", node.time},
        {"parent", node.parent ? json(t.external_id(*node.parent)) : json(nullptr)},
        {"cond_prob", node.cond_prob},
        {"xi", model.xi[n]},
        {"zeta", model.zeta[n]},
    });
  }
  return json{{"horizon", t.horizon()}, {"nodes", std::move(nodes)}};
}

json region_to_json(const StoppingTime& st) {
  json out = json::array();
  for (NodeId n : st.region()) out.push_back(st.tree().external_id(n));
  return out;
}

json family_to_json(const Family& f) {
  json out = json::object();
  for (NodeId n = 0; n < f.size(); ++n) {
    out[std::to_string(f.tree().external_id(n))] = f[n];
  }
  return out;
}

json solution_report(const DynkinSolution& sol, const Family* offset) {
  const EventTree& t = sol.tree();
  json fails = json::array();
  for (NodeId n : sol.mokobodski.fails_at) fails.push_back(t.external_id(n));

  json report;
  if (sol.solved()) {
    const double shift = offset ? (*offset)[t.root()] : 0.0;
    report["value"] = (*sol.y)[t.root()] + shift;
  } else {
    report["value"] = nullptr;
  }
  report["converged"] = sol.converged;
  report["iterations"] = sol.iterations;
  report["mokobodski"] = sol.mokobodski.holds ? "holds" : "fails";
  report["fails_at"] = std::move(fails);
  report["J"] = family_to_json(sol.j);
  report["Jp"] = family_to_json(sol.jp);
  report["Y"] = sol.y ? family_to_json(*sol.y) : json::object();
  report["tau_star"] = sol.tau_star ? region_to_json(*sol.tau_star) : json::array();
  report["sigma_star"] = sol.sigma_star ? region_to_json(*sol.sigma_star) : json::array();
  report["terminal_offset"] = offset ? (*offset)[t.root()] : 0.0;
  return report;
}

json oracle_report_json(const oracle::OracleReport& report) {
  return json{{"lower", report.lower},
              {"upper", report.upper},
              {"count", report.strategy_count},
              {"table", report.pair_table}};
}

}  // namespace dynkin
