#pragma once

#include "blender/errors.hpp"
#include "blender/rational.hpp"
#include "blender/interval.hpp"
#include "blender/ifs.hpp"
#include "blender/skew_system.hpp"
#include "blender/steering.hpp"
#include "blender/historic.hpp"
#include "blender/blender_cert.hpp"
#include "blender/io.hpp"
#include "blender/cli.hpp"
