#pragma once

#include "modp/core.hpp"
#include "modp/chains.hpp"
#include "modp/flat_norm.hpp"
#include "modp/cyclic_fourier.hpp"
#include "modp/bockstein_cyc.hpp"
#include "modp/steenrod_planar.hpp"
#include "modp/gluing.hpp"
#include "modp/cellular_oracle.hpp"
#include "modp/io.hpp"
#include "modp/verify.hpp"
