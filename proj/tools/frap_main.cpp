#include "frap/harness.hpp"

int main(int argc, char** argv) { return frap::harness::run_cli(argc, argv); }
