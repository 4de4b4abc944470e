#include "cli_commands.hpp"

int main(int argc, char** argv) { return scarcli::run(argc, argv); }
