#include "curveflow/cli_runner.hpp"

int main(int argc, char** argv) { return curveflow::cli_main(argc, argv); }
