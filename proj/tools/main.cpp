#include "cli_app.hpp"

int main(int argc, char** argv) { return torus::cli::run(argc, argv); }
