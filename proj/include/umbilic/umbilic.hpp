#pragma once

#include "geometry.hpp"
#include "parallel.hpp"
#include "field.hpp"
#include "families.hpp"
#include "curvature.hpp"
#include "quad.hpp"
#include "transform.hpp"
#include "convexbody.hpp"
#include "scan.hpp"
#include "io.hpp"
