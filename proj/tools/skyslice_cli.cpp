// Command-line front end: run experiment suites, train a single learner,
// evaluate a saved MADDPG checkpoint.

#include "skyslice/errors.hpp"
#include "skyslice/harness/config.hpp"
#include "skyslice/harness/experiment.hpp"
#include "skyslice/harness/metrics.hpp"
#include "skyslice/marl/maddpg.hpp"
#include "skyslice/marl/slice_env.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace skyslice;

namespace {

struct CommonOptions {
  std::string config;
  std::string preset = "table1";
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<int> steps;
  std::string out;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "JSON scenario file")->check(CLI::ExistingFile);
  app->add_option("--preset", o.preset, "Base settings when no config is given")
      ->check(CLI::IsMember({"table1", "desk"}));
  app->add_option("--seed", o.seed, "Run a single seed instead of the configured list");
  app->add_option("--episodes", o.episodes, "Override the episode count")->check(CLI::PositiveNumber);
  app->add_option("--steps", o.steps, "Override the steps per episode")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "Output directory");
}

harness::ScenarioConfig resolve(const CommonOptions& o) {
  harness::ScenarioConfig c =
      !o.config.empty() ? harness::load_config(o.config)
                        : (o.preset == "desk" ? harness::desk_preset() : harness::default_config());
  if (o.seed) c.seeds = {*o.seed};
  if (o.episodes) c.learner.episodes = *o.episodes;
  if (o.steps) c.learner.steps = *o.steps;
  if (!o.out.empty()) c.output = o.out;
  c.validate();
  return c;
}

void emit(const nlohmann::ordered_json& line) { std::cout << line.dump() << std::endl; }

void report(const harness::RunOutcome& r) {
  nlohmann::ordered_json j = harness::to_json(r.summary);
  j["wall_seconds"] = r.wall_seconds;
  std::cerr << j.dump() << std::endl;
}

int fail(const char* kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network-slice orchestration for eVTOLs in layered airspace"};
  app.require_subcommand(1);

  CommonOptions run_opts, train_opts, eval_opts;
  std::string suite, algorithm = "maddpg", checkpoint;

  CLI::App* run = app.add_subcommand("run", "Run an experiment suite");
  run->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(harness::suite_names()));
  add_common(run, run_opts);

  CLI::App* train = app.add_subcommand("train", "Train one learner and write its metrics");
  train->add_option("--algorithm", algorithm, "maddpg, greedy or madqn")
      ->check(CLI::IsMember({"maddpg", "greedy", "madqn"}));
  add_common(train, train_opts);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Run noise-free episodes with a saved MADDPG checkpoint");
  evaluate->add_option("checkpoint", checkpoint, "Checkpoint directory written by train")
      ->required()
      ->check(CLI::ExistingDirectory);
  add_common(evaluate, eval_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), 2);
  }

  try {
    if (*run) {
      const harness::ScenarioConfig c = resolve(run_opts);
      const fs::path out = fs::path(c.output) / suite;
      const harness::SuiteResult r = harness::run_suite(c, suite, out, report);
      harness::write_text(out / "config.json", harness::dump_config(c));
      emit({{"status", "ok"}, {"suite", suite}, {"out", out.string()}, {"runs", r.runs.size()}});
    } else if (*train) {
      const harness::ScenarioConfig c = resolve(train_opts);
      const fs::path out = fs::path(c.output) / ("train_" + algorithm);
      for (std::uint64_t seed : c.seeds) {
        const std::string name = algorithm + "_seed" + std::to_string(seed);
        harness::RunSpec spec{name, harness::algorithm_from_string(algorithm), c.build_env(), c.learner, seed};
        const fs::path ckpt = algorithm == "maddpg" ? out / (name + ".checkpoint") : fs::path{};
        const harness::RunOutcome r = harness::execute(spec, ckpt);
        harness::write_run(out, name, r.episodes);
        if (!ckpt.empty()) harness::write_text(ckpt / "config.json", harness::dump_config(c));
        report(r);
      }
      harness::write_text(out / "config.json", harness::dump_config(c));
      emit({{"status", "ok"}, {"algorithm", algorithm}, {"out", out.string()}});
    } else if (*evaluate) {
      CommonOptions o = eval_opts;
      if (o.config.empty() && fs::exists(fs::path(checkpoint) / "config.json"))
        o.config = (fs::path(checkpoint) / "config.json").string();
      const harness::ScenarioConfig c = resolve(o);
      const marl::Maddpg learner = marl::Maddpg::load(checkpoint, c.learner);
      const fs::path out = fs::path(c.output) / "evaluate";
      for (std::uint64_t seed : c.seeds) {
        marl::SliceEnv env(c.build_env(), seed);
        if (env.agent_count() != learner.dims().agents || env.observation_dim() != learner.dims().obs_dim)
          throw ConfigError("checkpoint was trained for a different number of slices");
        const auto episodes = marl::evaluate_policy(env, learner, c.learner.episodes, c.learner.steps);
        const std::string name = "evaluate_seed" + std::to_string(seed);
        harness::write_run(out, name, episodes);
        std::cerr << harness::to_json(harness::summarize(name, "maddpg", seed, episodes, 1.0)).dump() << std::endl;
      }
      emit({{"status", "ok"}, {"checkpoint", checkpoint}, {"out", out.string()}});
    }
  } catch (const ConfigError& e) {
    return fail("config", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 4);
  }
  return 0;
}
