#include "thybal/commands.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return thybal::cli::run(argc, argv, std::cout, std::cerr);
}
