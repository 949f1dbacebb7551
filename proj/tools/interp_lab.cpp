// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "interp/cli.hpp"

int main(int argc, char** argv) { return interp::run_cli(argc, argv, std::cout, std::cerr); }
