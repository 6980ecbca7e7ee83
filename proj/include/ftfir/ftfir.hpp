#pragma once

#include "ftfir/arithmetic.hpp"
#include "ftfir/circuit.hpp"
#include "ftfir/ecg.hpp"
#include "ftfir/fir.hpp"
#include "ftfir/netlist_io.hpp"
#include "ftfir/redundancy.hpp"
#include "ftfir/resources.hpp"
#include "ftfir/rng.hpp"
#include "ftfir/simulate.hpp"
#include "ftfir/stream.hpp"
#include "ftfir/voters.hpp"
