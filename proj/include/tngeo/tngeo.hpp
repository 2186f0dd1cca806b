#ifndef TNGEO_TNGEO_HPP
#define TNGEO_TNGEO_HPP

// Umbrella header: dense labeled tensors, tensor-network geometries, the
// contraction/gradient engine, L-BFGS training and the sweep harness.

#include "tngeo/compact.hpp"
#include "tngeo/contraction.hpp"
#include "tngeo/engine.hpp"
#include "tngeo/errors.hpp"
#include "tngeo/geometry.hpp"
#include "tngeo/harness.hpp"
#include "tngeo/network.hpp"
#include "tngeo/optimizer.hpp"
#include "tngeo/rng.hpp"
#include "tngeo/surrogate.hpp"
#include "tngeo/tensor.hpp"

#endif // TNGEO_TNGEO_HPP
