#include "cli.hpp"

int main(int argc, char** argv) { return lpsub::cli::run(argc, argv); }
