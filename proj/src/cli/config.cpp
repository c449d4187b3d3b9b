#include "trion/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "trion/error.hpp"

namespace trion::cli {

using nlohmann::json;

namespace {

json basis_state(int alpha) {
  json s = json::array();
  for (int i = 1; i <= kTrionStates; ++i) s.push_back(json::array({i == alpha ? 1.0 : 0.0, 0.0}));
  return s;
}

json double_slit_start() {
  const double s = 1.0 / std::sqrt(2.0);
  json st = basis_state(0);
  st[0] = json::array({s, 0.0});
  st[6] = json::array({s, 0.0});
  return st;
}

json fig1_model(double phi) {
  return {{"w_e", 1.0}, {"w_2e", 1.0}, {"w_h", 0.6}, {"u", -1.0}, {"omega", 2.0}, {"phi", phi}};
}

json common_blocks() {
  return {
      {"sweep", {{"phi_min", 0.0}, {"phi_max", 50.0}, {"n_points", 1001}, {"pmin_states", json::array()}, {"n_periods", 30}}},
      {"dynamics", {{"n_periods", 30}, {"initial_state", basis_state(1)}}},
      {"entangle", {{"target", "eta"}, {"analytic", "pair"}, {"pair", {3, 5}}, {"filter", nullptr}}},
  };
}

json fig3_doc() {
  json d = common_blocks();
  d["model"] = {{"w_e", 1.7}, {"w_2e", 1.7}, {"w_h", 0.6}, {"u", -20.0}, {"omega", 2.0}, {"phi", 24.6}};
  return d;
}

json fig6_doc(const char* target) {
  json d = common_blocks();
  d["model"] = fig1_model(40.7);
  d["dynamics"]["initial_state"] = double_slit_start();
  d["entangle"] = {{"target", target}, {"analytic", "double_slit"}, {"pair", {2, 8}}, {"filter", nullptr}};
  return d;
}

json filtered_doc(std::vector<int> zeroed, const char* target, std::vector<int> pair) {
  json d = fig6_doc(target);
  d["entangle"]["analytic"] = "pair";
  d["entangle"]["pair"] = pair;
  d["entangle"]["filter"] = {{"zeroed", zeroed}, {"mode", "renormalize"}};
  return d;
}

template <class T>
T get_as(const json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": wrong type (" + v.dump() + ")");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + "." + key + " must be finite");
  return x;
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<int>();
}

void require_object(const json& v, const std::string& where) {
  if (!v.is_object()) throw ConfigError(where + " must be an object");
}

void allow_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : obj.items())
    if (!allowed.count(k)) throw ConfigError("unknown key " + where + "." + k);
}

std::vector<int> state_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array of state indices");
  std::vector<int> out;
  for (const json& x : v) {
    if (!x.is_number_integer()) throw ConfigError(where + " entries must be integers");
    const int a = x.get<int>();
    if (a < 1 || a > kTrionStates) throw ConfigError(where + " entries must be in 1..8");
    out.push_back(a);
  }
  return out;
}

// Non-null optional number; null or absent means "use the default".
double optional_number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return get_number(obj, key, where);
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1", "fig3", "fig4", "fig5", "fig6", "fig7", "fig9", "fig10", "decoupled"};
}

json preset(const std::string& name) {
  if (name == "fig1") {
    json d = common_blocks();
    d["model"] = fig1_model(0.0);
    d["sweep"]["pmin_states"] = {1, 2};
    return d;
  }
  if (name == "fig3" || name == "fig4" || name == "fig5") return fig3_doc();
  if (name == "fig6") return fig6_doc("beta");
  if (name == "fig10") return fig6_doc("alpha");
  if (name == "fig7") return filtered_doc({1, 7}, "beta", {2, 8});
  if (name == "fig9") return filtered_doc({2, 8}, "alpha", {1, 7});
  if (name == "decoupled") {
    json d = common_blocks();
    d["model"] = {{"w_e", 0.0}, {"w_2e", 0.0}, {"w_h", 0.0}, {"u", -1.0}, {"omega", 2.0}, {"phi", 0.0}};
    d["sweep"]["phi_max"] = 10.0;
    d["sweep"]["n_points"] = 11;
    d["dynamics"]["initial_state"] = basis_state(2);
    return d;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

json override_patch(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("empty component in override key: " + path);
    parts.push_back(part);
  }
  json patch = value;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  return patch;
}

json layer_config(const std::string& preset_name, const json& file, const std::vector<std::string>& overrides) {
  if (!file.is_object()) throw ConfigError("config file must contain a JSON object");
  std::string name = preset_name;
  if (name.empty() && file.contains("preset")) name = get_as<std::string>(file.at("preset"), "preset");
  json doc = name.empty() ? common_blocks() : preset(name);
  json body = file;
  body.erase("preset");
  doc.merge_patch(body);
  for (const std::string& o : overrides) doc.merge_patch(override_patch(o));
  return doc;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file " + path + " is not valid JSON");
  return doc;
}

RunConfig to_run_config(const json& doc) {
  require_object(doc, "config");
  allow_keys(doc, {"model", "integrator", "sweep", "dynamics", "entangle", "crossings", "workers", "output"}, "config");
  RunConfig cfg;

  if (!doc.contains("model")) throw ConfigError("config needs a model block (or a preset)");
  const json& m = doc.at("model");
  require_object(m, "model");
  allow_keys(m, {"w_e", "w_2e", "w_h", "u", "omega", "phi"}, "model");
  for (const char* key : {"w_e", "w_h", "u", "omega", "phi"})
    if (!m.contains(key)) throw ConfigError(std::string("model.") + key + " is required");
  cfg.model.w_e = get_number(m, "w_e", "model");
  cfg.model.w_2e = m.contains("w_2e") ? get_number(m, "w_2e", "model") : cfg.model.w_e;
  cfg.model.w_h = get_number(m, "w_h", "model");
  cfg.model.u = get_number(m, "u", "model");
  cfg.model.omega = get_number(m, "omega", "model");
  cfg.model.phi = get_number(m, "phi", "model");

  if (doc.contains("integrator")) {
    const json& in = doc.at("integrator");
    require_object(in, "integrator");
    allow_keys(in, {"steps_per_period", "sample_stride"}, "integrator");
    if (in.contains("steps_per_period")) cfg.integrator.steps_per_period = get_int(in, "steps_per_period", "integrator");
    if (in.contains("sample_stride")) cfg.integrator.sample_stride = get_int(in, "sample_stride", "integrator");
  }

  if (doc.contains("workers")) {
    if (!doc.at("workers").is_number_integer() || doc.at("workers").get<int>() < 0) {
      throw ConfigError("workers must be a non-negative integer");
    }
    cfg.workers = doc.at("workers").get<int>();
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    require_object(s, "sweep");
    allow_keys(s, {"phi_min", "phi_max", "n_points", "pmin_states", "n_periods"}, "sweep");
    if (s.contains("phi_min")) cfg.sweep.phi_min = get_number(s, "phi_min", "sweep");
    if (s.contains("phi_max")) cfg.sweep.phi_max = get_number(s, "phi_max", "sweep");
    if (s.contains("n_points")) cfg.sweep.n_points = get_int(s, "n_points", "sweep");
    if (s.contains("pmin_states")) cfg.sweep.pmin_states = state_list(s.at("pmin_states"), "sweep.pmin_states");
    if (s.contains("n_periods")) cfg.sweep.n_periods = get_int(s, "n_periods", "sweep");
  }
  cfg.sweep.workers = cfg.workers;

  if (doc.contains("dynamics")) {
    const json& d = doc.at("dynamics");
    require_object(d, "dynamics");
    allow_keys(d, {"n_periods", "initial_state"}, "dynamics");
    if (d.contains("n_periods")) cfg.n_periods = get_int(d, "n_periods", "dynamics");
    if (d.contains("initial_state")) {
      const json& st = d.at("initial_state");
      if (!st.is_array() || st.size() != kTrionStates) {
        throw ConfigError("dynamics.initial_state must be 8 [re, im] pairs");
      }
      Amplitudes a{};
      for (int i = 0; i < kTrionStates; ++i) {
        const json& pr = st[static_cast<std::size_t>(i)];
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number() || !pr[1].is_number()) {
          throw ConfigError("dynamics.initial_state entries must be [re, im] number pairs");
        }
        a[i] = Complex(pr[0].get<double>(), pr[1].get<double>());
        if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag())) {
          throw ConfigError("dynamics.initial_state must be finite");
        }
      }
      double n = 0.0;
      for (const Complex& c : a) n += std::norm(c);
      if (!(n > 0.0)) throw ConfigError("dynamics.initial_state is the zero vector");
      if (std::abs(n - 1.0) > 1e-6) {
        cfg.warnings.push_back("initial state had norm^2 " + std::to_string(n) + "; renormalized");
      }
      cfg.initial_state = StateVector::normalized(a);
    }
  }
  if (cfg.n_periods < 1) throw ConfigError("dynamics.n_periods must be at least 1");

  cfg.entangle.window = std::max(1, cfg.integrator.sample_stride > 0
                                        ? cfg.integrator.steps_per_period / cfg.integrator.sample_stride
                                        : 1);
  if (doc.contains("entangle")) {
    const json& e = doc.at("entangle");
    require_object(e, "entangle");
    allow_keys(e, {"target", "analytic", "pair", "filter"}, "entangle");
    if (e.contains("target")) {
      const auto label = parse_bell_label(get_as<std::string>(e.at("target"), "entangle.target"));
      if (!label) throw ConfigError("entangle.target must be eta, alpha or beta");
      cfg.entangle.target = *label;
    }
    if (e.contains("analytic")) {
      const std::string a = get_as<std::string>(e.at("analytic"), "entangle.analytic");
      if (a == "pair") cfg.entangle.analytic = AnalyticForm::pair;
      else if (a == "double_slit") cfg.entangle.analytic = AnalyticForm::double_slit;
      else throw ConfigError("entangle.analytic must be pair or double_slit");
    }
    if (e.contains("pair")) {
      const std::vector<int> p = state_list(e.at("pair"), "entangle.pair");
      if (p.size() != 2 || p[0] == p[1]) throw ConfigError("entangle.pair must list two distinct states");
      cfg.entangle.pair_i = p[0];
      cfg.entangle.pair_j = p[1];
    }
    if (e.contains("filter") && !e.at("filter").is_null()) {
      const json& f = e.at("filter");
      require_object(f, "entangle.filter");
      allow_keys(f, {"zeroed", "mode"}, "entangle.filter");
      FilterSpec spec;
      for (int a : state_list(f.value("zeroed", json::array()), "entangle.filter.zeroed")) {
        spec.zeroed.set(static_cast<std::size_t>(a - 1));
      }
      if (f.contains("mode")) {
        const std::string mode = get_as<std::string>(f.at("mode"), "entangle.filter.mode");
        if (mode == "renormalize") spec.mode = FilterMode::renormalize;
        else if (mode == "paper-literal") spec.mode = FilterMode::group_weighted;
        else throw ConfigError("entangle.filter.mode must be renormalize or paper-literal");
      }
      if (spec.zeroed.all()) throw ConfigError("entangle.filter.zeroed cannot list all eight states");
      cfg.entangle.filter = spec;
    }
  }

  if (doc.contains("crossings")) {
    const json& c = doc.at("crossings");
    require_object(c, "crossings");
    allow_keys(c, {"exact_tol", "max_gap"}, "crossings");
    cfg.crossings.exact_tol = optional_number(c, "exact_tol", -1.0, "crossings");
    cfg.crossings.max_gap = optional_number(c, "max_gap", -1.0, "crossings");
  }
  cfg.crossings.workers = cfg.workers;

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    require_object(o, "output");
    allow_keys(o, {"path", "format"}, "output");
    if (o.contains("path") && !o.at("path").is_null()) cfg.out_path = get_as<std::string>(o.at("path"), "output.path");
    if (o.contains("format")) {
      const std::string f = get_as<std::string>(o.at("format"), "output.format");
      if (f == "csv") cfg.format = OutputFormat::csv;
      else if (f == "json") cfg.format = OutputFormat::json;
      else throw ConfigError("output.format must be csv or json");
    }
  }

  try {
    cfg.model.validate();
    cfg.integrator.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace trion::cli
