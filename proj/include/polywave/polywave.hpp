#pragma once

#include "polywave/analysis.hpp"
#include "polywave/assembly.hpp"
#include "polywave/basis.hpp"
#include "polywave/commands.hpp"
#include "polywave/errors.hpp"
#include "polywave/fields.hpp"
#include "polywave/geometry.hpp"
#include "polywave/io_matrix.hpp"
#include "polywave/io_mesh.hpp"
#include "polywave/mesh.hpp"
#include "polywave/quadrature.hpp"
#include "polywave/scenario.hpp"
#include "polywave/space.hpp"
#include "polywave/timestepping.hpp"
#include "polywave/util.hpp"
#include "polywave/vtk.hpp"
