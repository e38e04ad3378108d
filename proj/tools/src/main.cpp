#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nlsd_cli/runner.hpp"

namespace {

using namespace nlsd::cli;

struct Flags {
  std::string config, preset, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> n, jobs;
  std::optional<double> g, tol;
  bool timing = false;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "INI config file");
  app->add_option("--seed", f.seed, "sampling seed");
  app->add_option("--n", f.n, "isospin dimension N");
  app->add_option("--g", f.g, "coupling g");
  app->add_option("--preset", f.preset, "named preset (see `presets list`)");
  app->add_option("--out", f.out, "report path (stdout when absent)");
  app->add_option("--tol", f.tol, "residual tolerance");
  app->add_option("--jobs", f.jobs, "worker threads for independent checks");
  app->add_flag("--timing", f.timing, "record wall time in the report");
}

void merge(ptree& into, const ptree& from, const std::string& prefix = "") {
  for (const auto& [k, v] : from) {
    const std::string path = prefix.empty() ? k : prefix + "." + k;
    if (v.empty())
      into.put(path, v.data());
    else
      merge(into, v, path);
  }
}

int execute(const std::string& task, const Flags& f) {
  ptree tree;
  if (!f.preset.empty()) merge(tree, preset_tree(f.preset));
  if (!f.config.empty()) merge(tree, read_ini(f.config));
  tree.put("run.task", task);
  if (f.seed) tree.put("run.seed", *f.seed);
  if (f.n) tree.put("run.N", *f.n);
  if (f.g) tree.put("run.g", *f.g);
  if (f.tol) tree.put("run.tol", *f.tol);
  if (f.jobs) tree.put("run.jobs", *f.jobs);
  if (!f.out.empty()) tree.put("run.out", f.out);
  RunConfig cfg = load_config(tree);
  cfg.timing = f.timing;
  const Report rep = run(cfg);
  const std::string text = render(rep);
  if (cfg.out.empty())
    std::cout << text;
  else
    write_atomic(cfg.out, text);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlsd: defect scattering verification toolkit"};
  app.require_subcommand(1);

  Flags flags;
  std::string task;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, const std::string& t) {
    CLI::App* sub = parent->add_subcommand(name, help);
    add_flags(sub, flags);
    sub->callback([&task, t] { task = t; });
  };

  CLI::App* verify = app.add_subcommand("verify", "identity checks");
  verify->require_subcommand(1);
  leaf(verify, "smatrix", "unitarity and Yang-Baxter of the doubled S-matrix", "verify-smatrix");
  leaf(verify, "rep", "representation constraints and RT equations", "verify-rep");
  leaf(verify, "rt-equations", "RT equations only", "verify-rt-equations");
  leaf(&app, "classify", "classified family: case, constraints and RT equations", "classify-rep");
  leaf(&app, "amplitude", "vacuum amplitudes from the normal-ordering engine", "amplitude");
  leaf(&app, "hierarchy", "hierarchy commutators, involution and defect symmetry", "hierarchy");
  CLI::App* boundary = app.add_subcommand("boundary", "boundary conditions");
  boundary->require_subcommand(1);
  leaf(boundary, "derive", "closed-form case solution and its differential form", "boundary-derive");
  leaf(boundary, "verify", "jump condition or case solution on free solutions", "boundary-verify");
  CLI::App* breaking = app.add_subcommand("breaking", "symmetry breaking");
  breaking->require_subcommand(1);
  leaf(breaking, "expand", "Laurent coefficients of the vacuum expectation values", "breaking-expand");
  leaf(breaking, "classify", "broken and unbroken generators", "breaking-classify");

  CLI::App* presets = app.add_subcommand("presets", "named parameter presets");
  presets->require_subcommand(1);
  bool list = false;
  presets->add_subcommand("list", "print the preset catalog")->callback([&list] { list = true; });

  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& p : list_cases()) std::cout << p.name << "\t" << p.anchor << "\t" << p.description << "\n";
    return 0;
  }
  try {
    return execute(task, flags);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
