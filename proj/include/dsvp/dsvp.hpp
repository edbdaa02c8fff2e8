#pragma once

// Distributed fork-join runtime: indexed thread families with write-once
// channels, place-based delegation, a three-message wire protocol,
// description-driven data transfer, and fault recovery.

#include "bench.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "datadesc.hpp"
#include "demo.hpp"
#include "error.hpp"
#include "fault.hpp"
#include "histogram.hpp"
#include "log.hpp"
#include "net.hpp"
#include "node.hpp"
#include "svp.hpp"
#include "types.hpp"
#include "value.hpp"
#include "wire.hpp"
