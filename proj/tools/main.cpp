// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qsr::cli::run_cli(std::move(args), std::cout, std::cerr);
}
