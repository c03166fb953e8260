#include <rgd/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    return rgd::cli_main(argc, argv, std::cout, std::cerr);
}
