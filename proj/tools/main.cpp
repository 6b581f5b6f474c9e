#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "mining/errors.hpp"
#include "mining/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::int64_t seed = -1;
  std::string out_dir;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "JSON config file")->required();
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--out", args.out_dir, "override the output directory");
  cmd->add_option("--threads", args.threads, "override the thread count");
}

mining::PipelineConfig make_config(const CommonArgs& args) {
  mining::PipelineConfig config = mining::load_config(args.config_path);
  if (args.seed >= 0) {
    config.seed = static_cast<std::uint64_t>(args.seed);
    config.gbdt.seed = config.seed;
    config.synth.seed = config.seed;
  }
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (args.threads > 0) {
    config.num_threads = args.threads;
    config.gbdt.num_threads = args.threads;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular mining toolkit: feature engineering, boosted trees, PU ranking"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const mining::PipelineConfig&);
  };
  const Command commands[] = {
      {"explore", "summarize the input tables", mining::cmd_explore},
      {"features", "run the feature-engineering pipeline", mining::cmd_features},
      {"adversarial", "adversarial validation between train and test", mining::cmd_adversarial},
      {"cv", "cross-validated model comparison", mining::cmd_cv},
      {"train", "train the boosted-tree model", mining::cmd_train},
      {"predict", "score a table with a saved model", mining::cmd_predict},
      {"pu", "positive-unlabeled ranking", mining::cmd_pu},
      {"synth", "generate a synthetic benchmark dataset", mining::cmd_synth},
  };

  CommonArgs args[sizeof(commands) / sizeof(commands[0])];
  for (std::size_t i = 0; i < sizeof(commands) / sizeof(commands[0]); ++i)
    add_common(app.add_subcommand(commands[i].name, commands[i].help), args[i]);

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < sizeof(commands) / sizeof(commands[0]); ++i) {
      if (app.get_subcommand(commands[i].name)->parsed()) {
        commands[i].run(make_config(args[i]));
        return 0;
      }
    }
  } catch (const mining::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const mining::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const mining::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
