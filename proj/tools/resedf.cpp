#include "resedf/cli.hpp"

int main(int argc, char** argv)
{
  return resedf::cli::run(argc, argv);
}
