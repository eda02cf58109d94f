#include "brunesynth/io.hpp"

int main(int argc, char** argv) { return brunesynth::io::cli(argc, argv); }
