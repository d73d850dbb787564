#include "dbf/cli/commands.hpp"

int main(int argc, char** argv) { return dbf::cli::run(argc, argv); }
