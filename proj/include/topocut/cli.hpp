/*******************************************************************************
 * Copyright (c) 2026 The topocut Authors.                                     *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <iosfwd>

namespace topocut::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Subcommands: exact-energy, topologies, topo-search, cut-search, full,
/// report. Errors go to `err` as a single `error: ...` line.
int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace topocut::cli
