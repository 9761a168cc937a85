#pragma once

#include "memnet/drives_io.hpp"
#include "memnet/dynamics.hpp"
#include "memnet/errors.hpp"
#include "memnet/memristor.hpp"
#include "memnet/network.hpp"
#include "memnet/network_io.hpp"
#include "memnet/readout.hpp"
#include "memnet/signals.hpp"
#include "memnet/spectral.hpp"
#include "memnet/spectral_io.hpp"
#include "memnet/trace_io.hpp"
