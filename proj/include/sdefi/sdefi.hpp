#pragma once

// Umbrella header for the library (the CLI lives in sdefi/cli.hpp).

#include "sdefi/error.hpp"
#include "sdefi/io.hpp"
#include "sdefi/ito.hpp"
#include "sdefi/linalg.hpp"
#include "sdefi/mc.hpp"
#include "sdefi/parallel.hpp"
#include "sdefi/perturb.hpp"
#include "sdefi/poly.hpp"
#include "sdefi/poly_text.hpp"
#include "sdefi/rational.hpp"
#include "sdefi/report.hpp"
#include "sdefi/resonance.hpp"
#include "sdefi/search.hpp"
#include "sdefi/spectral.hpp"
#include "sdefi/upoly.hpp"
