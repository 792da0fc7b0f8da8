#include "sdpdal/io.hpp"

int main(int argc, char** argv) { return sdpdal::run_cli(argc, argv); }
