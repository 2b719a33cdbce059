#include "eisp_cli/commands.hpp"

int main(int argc, char** argv) { return eisp::cli::run(std::vector<std::string>(argv + 1, argv + argc)); }
