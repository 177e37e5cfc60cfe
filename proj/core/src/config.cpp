#include "plateau/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "plateau/io_util.hpp"

namespace plateau {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad(const std::string& what) {
  throw std::runtime_error("config: " + what);
}

double to_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) bad("trailing junk in value for '" + key + "'");
    return d;
  } catch (const std::logic_error&) {
    bad("bad numeric value '" + v + "' for '" + key + "'");
  }
}

int to_int(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) bad("trailing junk in value for '" + key + "'");
    return static_cast<int>(d);
  } catch (const std::logic_error&) {
    bad("bad integer value '" + v + "' for '" + key + "'");
  }
}

uint64_t to_seed(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) bad("trailing junk in value for '" + key + "'");
    return d;
  } catch (const std::logic_error&) {
    bad("bad seed value '" + v + "' for '" + key + "'");
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  bad("bad boolean value '" + v + "' for '" + key + "'");
}

std::vector<int> to_int_list(const std::string& v, const std::string& key) {
  std::istringstream is(v);
  std::vector<int> out;
  int w = 0;
  while (is >> w) out.push_back(w);
  if (!is.eof()) bad("bad integer list for '" + key + "'");
  if (out.empty()) bad("empty integer list for '" + key + "'");
  return out;
}

}  // namespace

KnotCurve curve_by_name(const std::string& name) {
  std::string base = name;
  bool star = false;
  if (!base.empty() && base.back() == '*') {
    star = true;
    base.pop_back();
  }
  KnotCurve c;
  if (base == "unknot" || base == "figure8" || base == "three_twist" ||
      base == "stevedore" || base == "square")
    c = preset_curve(preset_from_string(base));
  else if (base == "3_1")
    c = torus_knot(2, 3);
  else if (base == "4_1")
    c = preset_curve(CurvePreset::kFigureEight);
  else if (base == "5_1")
    c = torus_knot(2, 5);
  else if (base == "5_2")
    c = preset_curve(CurvePreset::kThreeTwist);
  else if (base == "6_1")
    c = preset_curve(CurvePreset::kStevedore);
  else if (base == "8_19")
    c = torus_knot(3, 4);
  else if (base == "10_124")
    c = torus_knot(3, 5);
  else
    throw std::invalid_argument("unknown knot name '" + name + "'");
  return star ? mirror_curve(c) : c;
}

KnotCurve ExperimentConfig::build_curve() const {
  KnotCurve c;
  if (torus_set)
    c = torus_knot(torus_p, torus_q, torus_R, torus_r);
  else if (!knot.empty())
    c = curve_by_name(knot);
  else
    bad("no curve: set 'knot' or 'torus' in [curve]");
  if (mirror) c = mirror_curve(c);
  if (sigma > 0.0) c = perturb(c, sigma, sigma_modes, curve_seed);
  return c;
}

ModelConfig ExperimentConfig::build_model() const {
  ModelConfig m;
  m.curve = build_curve();
  m.rho = rho;
  m.ext = ext;
  m.k = k;
  m.arch.in_dim = 2;
  m.arch.hidden = hidden;
  m.arch.out_dim = m.curve.ambient_dim + 1;
  m.arch.act = activation;
  m.validate();
  return m;
}

std::vector<double> ExperimentConfig::initial_params() const {
  return init_params(build_model().arch, init, init_seed);
}

Checkpoint ExperimentConfig::initial_checkpoint() const {
  Checkpoint c;
  c.model = build_model();
  c.params = initial_params();
  c.meta.phase = "init";
  c.meta.seed = train.seed;
  c.meta.loss = 0.0;
  return c;
}

ExperimentConfig parse_config(std::istream& is) {
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  return parse_config(f);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.raw_text = text;

  // Profile resolution is two-pass: remember which train keys were given
  // explicitly, apply them after the profile defaults.
  std::vector<std::pair<std::string, std::string>> train_overrides;
  bool train_seed_set = false, init_seed_set = false, curve_seed_set = false;
  bool eval_section = false, eval_seed_set = false;

  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad("unterminated section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known = {
          "experiment", "curve", "model", "train", "intersect", "eval"};
      if (!known.count(section)) bad("unknown section [" + section + "]");
      if (section == "eval") eval_section = true;
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      bad("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) bad("line " + std::to_string(lineno) + ": empty key");
    if (val.empty()) bad("empty value for '" + key + "'");
    if (section.empty()) bad("key '" + key + "' before any [section]");
    const std::string qual = section + "." + key;
    if (!seen.insert(qual).second) bad("duplicate key '" + qual + "'");

    if (section == "experiment") {
      if (key == "name") cfg.name = val;
      else if (key == "out_dir") cfg.out_dir = val;
      else bad("unknown key '" + qual + "'");
    } else if (section == "curve") {
      if (key == "knot") cfg.knot = val;
      else if (key == "torus") {
        std::istringstream t(val);
        cfg.torus_set = true;
        if (!(t >> cfg.torus_p >> cfg.torus_q))
          bad("torus needs 'p q [R r]'");
        if (t >> cfg.torus_R) {
          if (!(t >> cfg.torus_r)) bad("torus: R given without r");
        }
      } else if (key == "mirror") cfg.mirror = to_bool(val, qual);
      else if (key == "sigma") cfg.sigma = to_double(val, qual);
      else if (key == "sigma_modes") cfg.sigma_modes = to_int(val, qual);
      else if (key == "curve_seed") {
        cfg.curve_seed = to_seed(val, qual);
        curve_seed_set = true;
      } else bad("unknown key '" + qual + "'");
    } else if (section == "model") {
      if (key == "rho") cfg.rho = rho_from_string(val);
      else if (key == "ext") cfg.ext = ext_from_string(val);
      else if (key == "k") cfg.k = to_int(val, qual);
      else if (key == "hidden") cfg.hidden = to_int_list(val, qual);
      else if (key == "activation") cfg.activation = activation_from_string(val);
      else if (key == "init") {
        if (val == "zero") cfg.init = InitKind::kZero;
        else if (val == "glorot_zero_head") cfg.init = InitKind::kGlorotZeroHead;
        else bad("unknown init '" + val + "'");
      } else if (key == "init_seed") {
        cfg.init_seed = to_seed(val, qual);
        init_seed_set = true;
      } else bad("unknown key '" + qual + "'");
    } else if (section == "train") {
      if (key == "profile") cfg.profile = val;
      else if (key == "seed") {
        cfg.train.seed = to_seed(val, qual);
        train_seed_set = true;
      } else if (key == "n_data" || key == "batch" || key == "t_adam" ||
                 key == "eta0" || key == "eta_min" || key == "n_lbfgs" ||
                 key == "t_lbfgs" || key == "history" || key == "delta_g" ||
                 key == "delta_theta")
        train_overrides.emplace_back(key, val);
      else bad("unknown key '" + qual + "'");
    } else if (section == "intersect") {
      if (key == "grid") cfg.intersect.grid_res = to_int(val, qual);
      else if (key == "epsilon") cfg.intersect.epsilon = to_double(val, qual);
      else if (key == "tau") cfg.intersect.tau_img = to_double(val, qual);
      else bad("unknown key '" + qual + "'");
    } else if (section == "eval") {
      if (key == "samples") cfg.eval.samples = to_int(val, qual);
      else if (key == "size") cfg.eval.size = to_int(val, qual);
      else if (key == "eval_seed") {
        cfg.eval.seed = to_seed(val, qual);
        eval_seed_set = true;
      } else bad("unknown key '" + qual + "'");
    }
  }

  // Resolve the training profile, then apply explicit overrides on top.
  const uint64_t seed_keep = cfg.train.seed;
  if (cfg.profile == "full") cfg.train = TrainConfig{};
  else if (cfg.profile == "desk") cfg.train = desk_train_config();
  else if (cfg.profile == "custom") cfg.train = TrainConfig{};
  else bad("unknown train profile '" + cfg.profile + "'");
  cfg.train.seed = seed_keep;
  for (const auto& [key, val] : train_overrides) {
    const std::string qual = "train." + key;
    if (key == "n_data") cfg.train.n_data = to_int(val, qual);
    else if (key == "batch") cfg.train.batch = to_int(val, qual);
    else if (key == "t_adam") cfg.train.t_adam = to_int(val, qual);
    else if (key == "eta0") cfg.train.eta0 = to_double(val, qual);
    else if (key == "eta_min") cfg.train.eta_min = to_double(val, qual);
    else if (key == "n_lbfgs") cfg.train.n_lbfgs = to_int(val, qual);
    else if (key == "t_lbfgs") cfg.train.t_lbfgs = to_int(val, qual);
    else if (key == "history") cfg.train.history = to_int(val, qual);
    else if (key == "delta_g") cfg.train.delta_g = to_double(val, qual);
    else if (key == "delta_theta") cfg.train.delta_theta = to_double(val, qual);
  }

  // Hard requirements: every consumed seed is explicit in the file.
  if (!train_seed_set) bad("[train] seed is required");
  if (!init_seed_set && cfg.init != InitKind::kZero)
    bad("[model] init_seed is required unless init = zero");
  if (cfg.sigma > 0.0 && !curve_seed_set)
    bad("[curve] curve_seed is required when sigma > 0");
  if (cfg.sigma < 0.0) bad("[curve] sigma must be >= 0");
  if (cfg.sigma > 0.0 && cfg.sigma_modes < 1)
    bad("[curve] sigma_modes must be >= 1 when sigma > 0");
  if (eval_section && !eval_seed_set) bad("[eval] eval_seed is required");
  if (cfg.knot.empty() && !cfg.torus_set)
    bad("[curve] needs 'knot' or 'torus'");
  if (!cfg.knot.empty() && cfg.torus_set)
    bad("[curve] 'knot' and 'torus' are mutually exclusive");
  if (cfg.out_dir.empty()) cfg.out_dir = cfg.name;

  cfg.train.validate();
  if (cfg.intersect.grid_res < 16) bad("[intersect] grid must be >= 16");
  if (!(cfg.intersect.epsilon > 0.0 && cfg.intersect.epsilon < 2.0))
    bad("[intersect] epsilon must lie in (0, 2)");
  if (!(cfg.intersect.tau_img > 0.0)) bad("[intersect] tau must be > 0");
  if (cfg.eval.samples < 2) bad("[eval] samples must be >= 2");
  if (cfg.eval.size < 1) bad("[eval] size must be >= 1");
  cfg.build_model();  // validates curve construction and k/ext coupling
  return cfg;
}

}  // namespace plateau
