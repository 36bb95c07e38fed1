#include "cli.hpp"

int main(int argc, char **argv)
{
    return qnes::cli::cli_main(argc, argv);
}
