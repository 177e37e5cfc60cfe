// plateau: train near-minimal discs in hyperbolic space asymptotic to a
// prescribed knot, locate their self-intersections, and compare the signed
// count against the knot's HOMFLY-polynomial predictions.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <memory>

#include "plateau/commands.hpp"

namespace {

std::string dir_of(const std::string& file) {
  const std::string d = std::filesystem::path(file).parent_path().string();
  return d.empty() ? std::string(".") : d;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace plateau;

  CLI::App app{
      "plateau: neural minimal discs in hyperbolic space, their "
      "self-intersections, and HOMFLY consistency checks"};
  app.require_subcommand(1);

  int n_threads = ThreadPool::env_threads();
  app.add_option("--threads", n_threads,
                 "worker threads (results are independent of this)")
      ->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "train a disc from a config file");
  std::string train_cfg_path, train_out;
  train->add_option("config", train_cfg_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--out", train_out,
                    "output directory (default <out-root>/<config out_dir>)");

  // eval
  auto* eval = app.add_subcommand(
      "eval", "Monte Carlo residual statistics for a checkpoint");
  std::string eval_ckpt, eval_out;
  int eval_samples = 1000, eval_size = 1 << 14, eval_heatmap = 128;
  uint64_t eval_seed = 0;
  eval->add_option("checkpoint", eval_ckpt)->required()->check(CLI::ExistingFile);
  eval->add_option("--samples", eval_samples, "number of Monte Carlo pools")
      ->capture_default_str();
  eval->add_option("--size", eval_size, "points per pool")
      ->capture_default_str();
  eval->add_option("--seed", eval_seed, "sampling seed")->capture_default_str();
  eval->add_option("--heatmap", eval_heatmap,
                   "residual grid resolution (0 disables)")
      ->capture_default_str();
  eval->add_option("--out", eval_out,
                   "output directory (default: next to the checkpoint)");

  // intersect
  auto* isec = app.add_subcommand(
      "intersect", "locate double points and the signed self-intersection "
                   "count");
  std::string isec_ckpt, isec_fixture, isec_out;
  IntersectConfig ic;
  isec->add_option("checkpoint", isec_ckpt)->check(CLI::ExistingFile);
  isec->add_option("--fixture", isec_fixture,
                   "analytic test immersion (one_crossing, two_crossing, "
                   "offset_plane) instead of a checkpoint");
  isec->add_option("--grid", ic.grid_res, "scan grid resolution")
      ->capture_default_str();
  isec->add_option("--eps", ic.epsilon, "domain separation threshold")
      ->capture_default_str();
  isec->add_option("--tau", ic.tau_img, "image proximity threshold")
      ->capture_default_str();
  isec->add_option("--out", isec_out,
                   "output directory (default: next to the checkpoint)");

  // report
  auto* rep = app.add_subcommand(
      "report", "one-line consistency report against the HOMFLY prediction");
  std::string rep_ckpt, rep_records, rep_out;
  int rep_samples = 100, rep_size = 1 << 12;
  uint64_t rep_seed = 0;
  IntersectConfig rep_ic;
  rep->add_option("checkpoint", rep_ckpt)->required()->check(CLI::ExistingFile);
  rep->add_option("--records", rep_records,
                  "double-point records file (default: double_points.txt "
                  "next to the checkpoint, recomputed if absent)");
  rep->add_option("--samples", rep_samples, "Monte Carlo pools")
      ->capture_default_str();
  rep->add_option("--size", rep_size, "points per pool")
      ->capture_default_str();
  rep->add_option("--seed", rep_seed, "sampling seed")->capture_default_str();
  rep->add_option("--grid", rep_ic.grid_res,
                  "scan resolution when recomputing records")
      ->capture_default_str();
  rep->add_option("--eps", rep_ic.epsilon, "domain separation threshold")
      ->capture_default_str();
  rep->add_option("--tau", rep_ic.tau_img, "image proximity threshold")
      ->capture_default_str();
  rep->add_option("--out", rep_out,
                  "output directory (default: next to the checkpoint)");

  // export-surface
  auto* exp = app.add_subcommand("export-surface",
                                 "triangulated mesh of the disc image");
  std::string exp_ckpt, exp_model = "halfspace", exp_out;
  int exp_rings = 64;
  exp->add_option("checkpoint", exp_ckpt)->required()->check(CLI::ExistingFile);
  exp->add_option("--model", exp_model, "halfspace | ball")
      ->check(CLI::IsMember({"halfspace", "ball"}))
      ->capture_default_str();
  exp->add_option("--rings", exp_rings, "radial resolution")
      ->capture_default_str();
  exp->add_option("--out", exp_out,
                  "output file (default surface_<model>.txt next to the "
                  "checkpoint)");

  CLI11_PARSE(app, argc, argv);

  try {
    ThreadPool pool(n_threads);

    if (*train) {
      const ExperimentConfig cfg = parse_config_file(train_cfg_path);
      const std::string out =
          train_out.empty() ? output_root() + "/" + cfg.out_dir : train_out;
      cmd_train(cfg, out, pool, std::cout);
    } else if (*eval) {
      const Checkpoint ckpt = load_checkpoint(eval_ckpt);
      const std::string out = eval_out.empty() ? dir_of(eval_ckpt) : eval_out;
      cmd_eval(ckpt, eval_samples, eval_size, eval_seed, eval_heatmap, out,
               pool, std::cout);
    } else if (*isec) {
      if (isec_ckpt.empty() == isec_fixture.empty()) {
        std::cerr << "intersect: give exactly one of <checkpoint> or "
                     "--fixture\n";
        return 1;
      }
      if (!isec_fixture.empty()) {
        auto u = fixture_by_name(isec_fixture);
        if (!u) {
          std::cerr << "intersect: unknown fixture '" << isec_fixture
                    << "'\n";
          return 1;
        }
        const std::string out = isec_out.empty()
                                    ? output_root() + "/fixture_" + isec_fixture
                                    : isec_out;
        cmd_intersect(*u, ic, out, std::cout);
      } else {
        const Checkpoint ckpt = load_checkpoint(isec_ckpt);
        const std::string out = isec_out.empty() ? dir_of(isec_ckpt) : isec_out;
        cmd_intersect(ckpt, ic, out, std::cout);
      }
    } else if (*rep) {
      const Checkpoint ckpt = load_checkpoint(rep_ckpt);
      const std::string out = rep_out.empty() ? dir_of(rep_ckpt) : rep_out;
      std::vector<DoublePointRecord> records;
      bool multiplicity = false;
      std::string records_path = rep_records;
      if (records_path.empty()) {
        const std::string guess = dir_of(rep_ckpt) + "/double_points.txt";
        if (std::filesystem::exists(guess)) records_path = guess;
      }
      if (!records_path.empty()) {
        records = read_records(records_path);
        multiplicity = has_image_multiplicity(records);
      } else {
        SurfaceImmersion u(ckpt.model, ckpt.params);
        const IntersectOutcome io = cmd_intersect(u, rep_ic, out, std::cout);
        records = io.analysis.records;
        multiplicity = io.analysis.multiplicity_flag;
      }
      cmd_report(ckpt, records, multiplicity, rep_samples, rep_size, rep_seed,
                 out, pool, std::cout);
    } else if (*exp) {
      const Checkpoint ckpt = load_checkpoint(exp_ckpt);
      const std::string out =
          exp_out.empty() ? dir_of(exp_ckpt) + "/surface_" + exp_model + ".txt"
                          : exp_out;
      cmd_export_surface(ckpt, exp_rings, exp_model == "ball", out, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
