#include "hjnet/run.hpp"

int main(int argc, char** argv) { return hjnet::cli::main_entry(argc, argv); }
