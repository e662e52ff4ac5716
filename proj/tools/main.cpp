#include "eulerlab/cli.hpp"

int main(int argc, char** argv) { return eulerlab::cli::dispatch(argc, argv); }
