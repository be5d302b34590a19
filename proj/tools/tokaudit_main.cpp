#include "tokaudit/cli.hpp"

int main(int argc, char** argv) {
    return tokaudit::run_cli(argc, argv);
}
