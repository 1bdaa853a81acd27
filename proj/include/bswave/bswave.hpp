#pragma once

#include "bswave/assembly.hpp"
#include "bswave/config.hpp"
#include "bswave/csr.hpp"
#include "bswave/errors.hpp"
#include "bswave/fe_space.hpp"
#include "bswave/geometry.hpp"
#include "bswave/io.hpp"
#include "bswave/mesh.hpp"
#include "bswave/mms.hpp"
#include "bswave/model.hpp"
#include "bswave/quadrature.hpp"
#include "bswave/scenarios.hpp"
#include "bswave/semidiscrete.hpp"
#include "bswave/solvers.hpp"
#include "bswave/timestepping.hpp"
#include "bswave/wave_setup.hpp"
