/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#include <iostream>

#include "topocut/cli.hpp"

int main(int argc, char **argv) {
  return topocut::cli::dispatch(argc, argv, std::cout, std::cerr);
}
