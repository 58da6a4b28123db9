#include "nsocp/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nsocp/errors.hpp"

namespace nsocp {

namespace {

Error with_context(const Error& e, const std::string& where) {
  Error out(e.kind(), where + ": " + e.what());
  out.position = e.position;
  out.block = e.block;
  out.value = e.value;
  out.detail = e.detail.empty() ? where : e.detail;
  return out;
}

Error schema_error(const std::string& msg) { return Error(ErrorKind::InvalidProblem, msg); }

void dump_to(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      break;
    }
    case json::value_t::string:
      out += json(j.get<std::string>()).dump();
      break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        dump_to(e, out);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump_to(it.value(), out);
      }
      out += '}';
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump_to(j, out);
  return out;
}

ProblemSpec problem_from_json(const json& doc) {
  if (!doc.is_object()) throw schema_error("problem document must be a JSON object");
  for (const char* key : {"n", "objective", "constraints"})
    if (!doc.contains(key)) throw schema_error(std::string("missing field '") + key + "'");
  if (!doc["n"].is_number_integer()) throw schema_error("'n' must be an integer");
  const int n = doc["n"].get<int>();
  const std::string name = doc.value("name", std::string("unnamed"));
  if (!doc["objective"].is_string()) throw schema_error("'objective' must be a string");
  if (!doc["constraints"].is_array()) throw schema_error("'constraints' must be an array");

  std::vector<std::vector<std::string>> blocks;
  for (std::size_t j = 0; j < doc["constraints"].size(); ++j) {
    const json& c = doc["constraints"][j];
    const std::string where = "constraints[" + std::to_string(j) + "]";
    if (!c.is_object() || !c.contains("components") || !c["components"].is_array())
      throw schema_error(where + " needs a 'components' array");
    std::vector<std::string> comps;
    for (const auto& s : c["components"]) {
      if (!s.is_string()) throw schema_error(where + ".components entries must be strings");
      comps.push_back(s.get<std::string>());
    }
    if (c.contains("dim") && c["dim"].get<int>() != static_cast<int>(comps.size())) {
      Error e(ErrorKind::InvalidProblem, where + ": dim " + std::to_string(c["dim"].get<int>()) + " but " +
                                             std::to_string(comps.size()) + " components");
      e.block = static_cast<long>(j);
      throw e;
    }
    blocks.push_back(std::move(comps));
  }

  ProblemSpec p;
  try {
    p = make_problem(name, n, doc["objective"].get<std::string>(), blocks);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidProblem) throw;
    // locate the offending expression
    try {
      parse(doc["objective"].get<std::string>(), n);
    } catch (const Error& e2) {
      throw with_context(e2, "objective");
    }
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      for (std::size_t i = 0; i < blocks[j].size(); ++i) {
        try {
          parse(blocks[j][i], n);
        } catch (const Error& e2) {
          Error out = with_context(e2, "constraints[" + std::to_string(j) + "].components[" + std::to_string(i) + "]");
          out.block = static_cast<long>(j);
          throw out;
        }
      }
    }
    throw;
  }

  if (doc.contains("points_of_interest")) {
    for (const auto& pt : doc["points_of_interest"]) {
      Vec v = vec_from_json(pt);
      if (v.size() != n) throw schema_error("point of interest has wrong dimension");
      p.points_of_interest.push_back(v);
    }
  }
  if (doc.contains("expected")) {
    if (!doc["expected"].is_object()) throw schema_error("'expected' must be an object");
    for (auto it = doc["expected"].begin(); it != doc["expected"].end(); ++it) {
      if (!it.value().is_boolean()) throw schema_error("expected." + it.key() + " must be boolean");
      p.expected[it.key()] = it.value().get<bool>();
    }
  }
  return p;
}

ProblemSpec load_problem_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = e.byte > 0 ? e.byte - 1 : 0;
    long line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    Error err(ErrorKind::SyntaxError,
              "malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col));
    err.position = static_cast<long>(pos);
    err.detail = e.what();
    throw err;
  }
  return problem_from_json(doc);
}

ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidProblem, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_problem_text(ss.str());
}

json problem_to_json(const ProblemSpec& p) {
  json doc;
  doc["name"] = p.name;
  doc["n"] = p.n;
  doc["objective"] = p.objective_text;
  json cons = json::array();
  for (const auto& b : p.constraints) cons.push_back({{"dim", b.dim}, {"components", b.texts}});
  doc["constraints"] = cons;
  json pts = json::array();
  for (const auto& v : p.points_of_interest) pts.push_back(vec_to_json(v));
  doc["points_of_interest"] = pts;
  if (!p.expected.empty()) doc["expected"] = p.expected;
  return doc;
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw schema_error("expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw schema_error("expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Vec parse_csv_vector(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::SyntaxError, "bad number '" + tok + "' in '" + csv + "'");
    }
    while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
    if (used != tok.size()) throw Error(ErrorKind::SyntaxError, "bad number '" + tok + "' in '" + csv + "'");
    vals.push_back(v);
  }
  if (vals.empty()) throw Error(ErrorKind::SyntaxError, "empty vector");
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

json to_json(const KktResidual& r) {
  return {{"stationarity", r.stationarity}, {"feasibility", r.feasibility}, {"complementarity", r.complementarity}};
}

json to_json(const IterateLog& it) {
  json j;
  j["k"] = it.k;
  j["x"] = vec_to_json(it.x);
  json mu = json::array();
  for (const auto& m : it.mu) mu.push_back(vec_to_json(m));
  j["mu"] = mu;
  if (it.delta) {
    json d = json::array();
    for (const auto& m : *it.delta) d.push_back(vec_to_json(m));
    j["delta"] = d;
  } else {
    j["delta"] = nullptr;
  }
  j["residuals"] = to_json(it.residuals);
  j["rho"] = it.rho;
  j["inner_iterations"] = it.inner_iterations;
  return j;
}

namespace {

json subsets_json(const SubsetSelection& s) {
  auto one_based = [](const std::vector<int>& v) {
    json a = json::array();
    for (int i : v) a.push_back(i + 1);
    return a;
  };
  return {{"JB", one_based(s.JB)}, {"J-", one_based(s.Jminus)}, {"J+", one_based(s.Jplus)}};
}

}  // namespace

json to_json(const CqVerdict& v) {
  json j;
  j["cq"] = v.name;
  j["status"] = status_name(v.status);
  if (v.witness) {
    const CqWitness& w = *v.witness;
    json wj;
    if (w.direction) wj["direction"] = vec_to_json(*w.direction);
    if (!w.steps.empty()) wj["steps"] = w.steps;
    if (w.dw) wj["dw"] = vec_to_json(*w.dw);
    if (!w.wbar.empty()) {
      json m = json::object();
      for (const auto& [j1, vec] : w.wbar) m[std::to_string(j1 + 1)] = vec_to_json(vec);
      wj["wbar"] = m;
    }
    if (w.subsets) wj["subsets"] = subsets_json(*w.subsets);
    if (w.cone_vector) wj["cone_vector"] = vec_to_json(*w.cone_vector);
    wj["measure"] = w.measure;
    wj["evidence"] = w.evidence;
    j["witness"] = wj;
  }
  if (v.certificate) {
    j["certificate"] = {{"worst_measure", v.certificate->worst_measure},
                        {"samples", v.certificate->samples},
                        {"note", v.certificate->note}};
  }
  return j;
}

json to_json(const SolverConfig& c) {
  return {{"method", method_name(c.method)},
          {"rho0", c.rho0},
          {"rho_growth", c.rho_growth},
          {"rho_max", c.rho_max},
          {"max_outer", c.max_outer},
          {"inner_tol_floor", c.inner_tol_floor},
          {"inner_max_iter", c.inner_max_iter},
          {"stationarity_tol", c.stationarity_tol},
          {"feasibility_tol", c.feasibility_tol},
          {"multiplier_box", c.multiplier_box},
          {"divergence_norm", c.divergence_norm},
          {"alpha0", c.alpha0},
          {"sigma", c.sigma},
          {"gamma1", c.gamma1},
          {"gamma2", c.gamma2},
          {"tau", c.tau},
          {"paper_literal", c.paper_literal}};
}

void apply_override(SolverConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::InvalidProblem, "config override needs key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string val = assignment.substr(eq + 1);
  auto num = [&]() {
    try {
      std::size_t used = 0;
      const double v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidProblem, "bad value for " + key + ": " + val);
    }
  };
  if (key == "rho0") c.rho0 = num();
  else if (key == "rho_growth") c.rho_growth = num();
  else if (key == "rho_max") c.rho_max = num();
  else if (key == "max_outer") c.max_outer = static_cast<int>(num());
  else if (key == "inner_tol_floor") c.inner_tol_floor = num();
  else if (key == "inner_max_iter") c.inner_max_iter = static_cast<int>(num());
  else if (key == "stationarity_tol") c.stationarity_tol = num();
  else if (key == "feasibility_tol") c.feasibility_tol = num();
  else if (key == "multiplier_box") c.multiplier_box = num();
  else if (key == "divergence_norm") c.divergence_norm = num();
  else if (key == "alpha0") c.alpha0 = num();
  else if (key == "sigma") c.sigma = num();
  else if (key == "gamma1") c.gamma1 = num();
  else if (key == "gamma2") c.gamma2 = num();
  else if (key == "tau") c.tau = num();
  else if (key == "paper_literal") c.paper_literal = val == "1" || val == "true";
  else throw Error(ErrorKind::InvalidProblem, "unknown config key '" + key + "'");
  if (c.rho0 <= 0 || c.rho_growth <= 1 || c.max_outer < 1 || c.alpha0 <= 0 || c.sigma <= 0 || c.sigma >= 1 ||
      c.gamma1 <= 0 || c.gamma1 > c.gamma2 || c.tau <= 0)
    throw Error(ErrorKind::InvalidProblem, "config value out of range after " + assignment);
}

}  // namespace nsocp
