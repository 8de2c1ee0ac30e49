#include <shearframe/cli.hpp>

int main(int argc, char** argv) { return shearframe::cli::dispatch(argc, argv); }
