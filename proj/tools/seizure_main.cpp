#include "seizure/cli.hpp"

int main(int argc, char** argv) { return seizure::cli::run(argc, argv); }
