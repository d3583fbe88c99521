// fedalign: command-line driver for the federated alignment pipeline.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fedalign/commands.hpp"
#include "fedalign/error.hpp"
#include "fedalign/experiment_config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> encoder;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required();
  cmd->add_option("--seed-override", f.seed, "replace the master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--format", f.format, "serialization format")
      ->check(CLI::IsMember({"structured", "natural", "compact"}));
  cmd->add_option("--encoder", f.encoder, "encoder backend")->check(CLI::IsMember({"hash", "store", "raw"}));
  cmd->add_flag("--quiet", f.quiet, "suppress progress output");
}

fedalign::CommandContext load(const CommonFlags& f) {
  using namespace fedalign;
  CommandContext ctx;
  ctx.config = load_config(f.config);
  Overrides o;
  o.seed = f.seed;
  o.output_dir = f.out;
  if (f.format) o.format = parse_format(*f.format);
  if (f.encoder) o.encoder = parse_encoder_kind(*f.encoder);
  apply_overrides(ctx.config, o);
  ctx.quiet = f.quiet;
  ctx.log = &std::cerr;
  return ctx;
}

int exit_code_for(const fedalign::Error& e) {
  switch (fedalign::category_of(e.code())) {
    case fedalign::ErrorCategory::config: return kExitConfig;
    case fedalign::ErrorCategory::data: return kExitData;
    case fedalign::ErrorCategory::runtime: return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated training over heterogeneous tabular schemas"};
  app.set_version_flag("--version", FEDALIGN_VERSION_STRING);
  app.require_subcommand(1);

  CommonFlags flags;
  using Runner = fedalign::CommandResult (*)(const fedalign::CommandContext&);
  const std::pair<const char*, Runner> commands[] = {
      {"prepare", fedalign::cmd_prepare},     {"serialize", fedalign::cmd_serialize},
      {"embed", fedalign::cmd_embed},         {"train", fedalign::cmd_train},
      {"stress", fedalign::cmd_stress},
  };
  const char* help[] = {
      "partition the dataset and write per-client splits",
      "write the serialized corpus",
      "encode the corpus, or validate an external store",
      "run multi-seed federated training",
      "sweep schema overlap levels",
  };
  std::vector<std::pair<CLI::App*, Runner>> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* cmd = app.add_subcommand(commands[i].first, help[i]);
    add_common(cmd, flags);
    subs.emplace_back(cmd, commands[i].second);
  }

  fedalign::SyntheticSpec gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "write a synthetic Framingham-shaped CSV");
  generate->add_option("--out", gen_out, "CSV path")->required();
  generate->add_option("--rows", gen.rows, "row count");
  generate->add_option("--positive-rate", gen.positive_rate, "fraction of positive labels");
  generate->add_option("--seed", gen.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (generate->parsed()) {
      fedalign::cmd_generate(gen_out, gen);
      return 0;
    }
    for (const auto& [cmd, runner] : subs) {
      if (!cmd->parsed()) continue;
      const auto result = runner(load(flags));
      if (!flags.quiet) std::cerr << "manifest: " << result.manifest.string() << '\n';
      return 0;
    }
  } catch (const fedalign::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
