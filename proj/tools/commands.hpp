#pragma once

#include <CLI11.hpp>
#include <functional>

namespace pgocli {

struct Command {
  CLI::App* sub = nullptr;
  std::function<int()> run;
};

Command make_corrupt(CLI::App& app);
Command make_generate(CLI::App& app);
Command make_solve(CLI::App& app);
Command make_bench(CLI::App& app);
Command make_eval(CLI::App& app);

}  // namespace pgocli
