#pragma once

#include "olmfsi/config.hpp"
#include "olmfsi/coupling.hpp"
#include "olmfsi/errors.hpp"
#include "olmfsi/geometry.hpp"
#include "olmfsi/linalg.hpp"
#include "olmfsi/manufactured_fields.hpp"
#include "olmfsi/mesh.hpp"
#include "olmfsi/mesh_io.hpp"
#include "olmfsi/mesh_motion.hpp"
#include "olmfsi/output.hpp"
#include "olmfsi/overlap.hpp"
#include "olmfsi/quadrature.hpp"
#include "olmfsi/solid.hpp"
#include "olmfsi/stokes.hpp"
#include "olmfsi/verification.hpp"
