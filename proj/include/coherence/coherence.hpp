// Umbrella header.

#pragma once

#include "bench.hpp"
#include "certificates.hpp"
#include "core.hpp"
#include "entanglement.hpp"
#include "measures.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "state_file.hpp"
#include "trace_distance.hpp"
#include "version.hpp"
