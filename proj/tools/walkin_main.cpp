// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "walkin/cli.hpp"

int main(int argc, char** argv) { return walkin::cli::run(argc, argv, std::cout, std::cerr); }
