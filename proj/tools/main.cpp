#include "dsieve/cli.hpp"

int main(int argc, char** argv) { return dsieve::cli::run(argc, argv); }
