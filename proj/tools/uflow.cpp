#include "commands.hpp"

int main(int argc, char** argv) { return uflow::cli::run(argc, argv); }
