// relsim: run the relational-similarity pipeline stage by stage or end to end.
//
//   relsim all --workdir out --n_patients 2000
//   relsim extract --k 5 --graphs diag,followup
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "relsim/error.hpp"
#include "relsim/pipeline.hpp"
#include "relsim/run_config.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relational-similarity features from clinician-patient visit logs"};
  app.name("relsim");
  app.require_subcommand(1, 1);

  std::string config_path;
  bool print_config = false;
  app.add_option("--config", config_path, "flat key=value config file; flags override its values");
  app.add_flag("--print-config", print_config, "echo the resolved configuration before running");

  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flags;
  for (const auto& info : relsim::describe_keys()) {
    const std::string key(info.key);
    flags[key] = app.add_option("--" + key, flag_values[key], std::string(info.help));
  }

  using Stage = void (*)(const relsim::RunConfig&, std::ostream&);
  const std::pair<const char*, Stage> stages[] = {
      {"synth", relsim::cmd_synth},       {"graphs", relsim::cmd_graphs},
      {"extract", relsim::cmd_extract},   {"train", relsim::cmd_train},
      {"evaluate", relsim::cmd_evaluate}, {"compare", relsim::cmd_compare},
      {"all", relsim::cmd_all},
  };
  const char* help[] = {
      "generate a synthetic event log and demographics",
      "label the cohort and build clinician-patient graphs",
      "compute spectral similarity features from the graphs",
      "train the baseline and similarity-augmented models",
      "score the hold-out interval and write reports and curves",
      "print and save the improvement table",
      "run every stage in order",
  };
  std::map<std::string, CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(stages); ++i) {
    subs[stages[i].first] = app.add_subcommand(stages[i].first, help[i])->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  Stage run = nullptr;
  std::string name;
  for (const auto& [n, fn] : stages) {
    if (subs[n]->parsed()) {
      run = fn;
      name = n;
    }
  }

  try {
    relsim::RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& info : relsim::describe_keys()) {
      const std::string key(info.key);
      if (flags[key]->count() > 0) cfg.set(key, flag_values[key]);
    }
    cfg.validate();
    if (print_config) cfg.print(std::cout);
    run(cfg, std::cout);
  } catch (const relsim::UsageError& e) {
    std::cerr << "relsim " << name << ": usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const relsim::NumericalError& e) {
    std::cerr << "relsim " << name << ": numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const relsim::DataError& e) {
    std::cerr << "relsim " << name << ": data error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "relsim " << name << ": data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "relsim " << name << ": internal error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
