#include <iostream>
#include <string>
#include <vector>

#include "mfpt/sweep.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const mfpt::SweepConfig config = mfpt::parse_config(args);
    return mfpt::run(config, std::cout, std::cerr);
  } catch (const mfpt::HelpRequested& help) {
    std::cout << help.what();
    return 0;
  } catch (const mfpt::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n(run with --help for options)\n";
    return 64;
  } catch (const mfpt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
