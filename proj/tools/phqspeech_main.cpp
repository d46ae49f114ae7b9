#include "phq/pipeline.hpp"

int main(int argc, char** argv) { return phq::cli_main(argc, argv); }
