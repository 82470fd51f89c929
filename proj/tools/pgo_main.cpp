#include <algorithm>
#include <iostream>
#include <vector>

#include "cli_common.hpp"
#include "commands.hpp"
#include "pgo/errors.hpp"

namespace {

int guarded(const std::function<int()>& run) {
  using namespace pgocli;
  try {
    return run();
  } catch (const pgo::SolverDiverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const pgo::NotEnoughCandidatePairs& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCorrupt;
  } catch (const pgo::InvalidProbability& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCorrupt;
  } catch (const pgo::MalformedLine& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const pgo::MixedDimensions& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const pgo::NonPositiveDefiniteInformation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const pgo::IndexOutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const pgo::LengthMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    std::cerr << "error: " << what << "\n";
    // Unreadable inputs and unwritable outputs are usage errors.
    return what.rfind("cannot open", 0) == 0 ||
                   what.rfind("cannot write", 0) == 0
               ? kExitParse
               : kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pgocli;

  CLI::App app{"Robust pose-graph optimization toolkit", "pgo"};
  app.require_subcommand(1);

  std::vector<Command> commands;
  commands.push_back(make_corrupt(app));
  commands.push_back(make_generate(app));
  commands.push_back(make_solve(app));
  commands.push_back(make_bench(app));
  commands.push_back(make_eval(app));

  // Config-file values are injected ahead of user flags, so the last
  // occurrence (the explicit flag) must win.
  for (const auto& c : commands)
    for (CLI::Option* opt : c.sub->get_options())
      if (!opt->get_positional() && opt != c.sub->get_help_ptr())
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<std::string> args;
  try {
    args = expand_config_args(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  for (const auto& c : commands)
    if (c.sub->parsed()) return guarded(c.run);
  return kExitParse;
}
