#include <CLI11.hpp>
#include <iostream>

#include "fsad/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fsad acceptance suite: one line per criterion"};
  bool quick = false;
  int threads = 0;
  std::vector<int> only;
  std::string work = "acceptance_work";
  app.add_flag("--quick", quick, "small path counts");
  app.add_flag("--full", "desk-scale path counts (default)");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--only", only, "criterion ids, comma separated")->delimiter(',');
  app.add_option("--work-dir", work, "scratch directory");
  CLI11_PARSE(app, argc, argv);

  const auto results = fsad::cli::run_acceptance(quick ? fsad::cli::Tier::quick : fsad::cli::Tier::full, threads,
                                                 work, std::cout, only);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << " of " << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
