#pragma once

// Umbrella header: termination analysis of nondeterministic quantum
// programs on finite-dimensional state spaces.

#include "qtc/core.hpp"
#include "qtc/linalg.hpp"
#include "qtc/subspace.hpp"
#include "qtc/channel.hpp"
#include "qtc/program.hpp"
#include "qtc/reachability.hpp"
#include "qtc/divergence.hpp"
#include "qtc/termination.hpp"
#include "qtc/walks.hpp"
#include "qtc/io.hpp"
