#include "torustau/cli.hpp"

int main(int argc, char** argv)
{
    return torustau::cli::run(argc, argv);
}
