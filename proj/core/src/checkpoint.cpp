#include "plateau/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "plateau/io_util.hpp"

namespace plateau {

void Checkpoint::validate() const {
  model.validate();
  if (params.size() != model.arch.param_count())
    throw std::invalid_argument(
        "Checkpoint: parameter count " + std::to_string(params.size()) +
        " does not match architecture (" +
        std::to_string(model.arch.param_count()) + ")");
  if (meta.phase != "init" && meta.phase != "adam" && meta.phase != "lbfgs")
    throw std::invalid_argument("Checkpoint: unknown phase '" + meta.phase +
                                "'");
}

void save_checkpoint(std::ostream& os, const Checkpoint& c) {
  c.validate();
  os << "plateau-checkpoint " << c.version << "\n";
  os << "activation " << to_string(c.model.arch.act) << "\n";
  os << "hidden";
  for (int w : c.model.arch.hidden) os << ' ' << w;
  os << "\n";
  os << "rho " << to_string(c.model.rho) << "\n";
  os << "ext " << to_string(c.model.ext) << "\n";
  os << "k " << c.model.k << "\n";
  write_curve(os, c.model.curve);
  os << "phase " << c.meta.phase << "\n";
  os << "seed " << c.meta.seed << "\n";
  os << "loss " << fmt17(c.meta.loss) << "\n";
  os << "params " << c.params.size() << "\n";
  for (double p : c.params) os << fmt17(p) << "\n";
  os << "end\n";
  if (!os) throw std::runtime_error("checkpoint write failed");
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  save_checkpoint(f, c);
  f.close();
  if (!f) throw std::runtime_error("checkpoint write failed: " + path);
}

namespace {

std::string expect_key(std::istream& is, const std::string& key) {
  std::string tok;
  if (!(is >> tok) || tok != key)
    throw std::runtime_error("checkpoint: expected '" + key + "', got '" +
                             tok + "'");
  return tok;
}

}  // namespace

Checkpoint load_checkpoint(std::istream& is) {
  Checkpoint c;
  std::string tok;
  if (!(is >> tok) || tok != "plateau-checkpoint")
    throw std::runtime_error("not a checkpoint file");
  int version = 0;
  if (!(is >> version)) throw std::runtime_error("checkpoint: bad version");
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint version " + std::to_string(version) +
                             " unsupported (this build reads version " +
                             std::to_string(kCheckpointVersion) + ")");
  c.version = version;

  expect_key(is, "activation");
  is >> tok;
  c.model.arch.act = activation_from_string(tok);

  expect_key(is, "hidden");
  {
    std::string rest;
    std::getline(is, rest);
    std::istringstream line(rest);
    c.model.arch.hidden.clear();
    int w = 0;
    while (line >> w) c.model.arch.hidden.push_back(w);
  }

  expect_key(is, "rho");
  is >> tok;
  c.model.rho = rho_from_string(tok);
  expect_key(is, "ext");
  is >> tok;
  c.model.ext = ext_from_string(tok);
  expect_key(is, "k");
  if (!(is >> c.model.k)) throw std::runtime_error("checkpoint: bad k");

  c.model.curve = read_curve(is);
  c.model.arch.out_dim = c.model.curve.ambient_dim + 1;

  expect_key(is, "phase");
  is >> c.meta.phase;
  expect_key(is, "seed");
  if (!(is >> c.meta.seed)) throw std::runtime_error("checkpoint: bad seed");
  expect_key(is, "loss");
  is >> tok;
  c.meta.loss = parse17(tok);

  expect_key(is, "params");
  size_t n = 0;
  if (!(is >> n)) throw std::runtime_error("checkpoint: bad param count");
  c.params.resize(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(is >> tok))
      throw std::runtime_error("checkpoint: short parameter block (" +
                               std::to_string(i) + " of " +
                               std::to_string(n) + ")");
    c.params[i] = parse17(tok);
  }
  expect_key(is, "end");
  c.validate();
  return c;
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
  return load_checkpoint(f);
}

}  // namespace plateau
