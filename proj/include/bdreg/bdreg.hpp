#pragma once

#include "bdreg/alpha_shape.hpp"
#include "bdreg/components.hpp"
#include "bdreg/decoder.hpp"
#include "bdreg/delaunay.hpp"
#include "bdreg/distance_transform.hpp"
#include "bdreg/encoder.hpp"
#include "bdreg/errors.hpp"
#include "bdreg/eval.hpp"
#include "bdreg/geometry.hpp"
#include "bdreg/grid.hpp"
#include "bdreg/losses.hpp"
#include "bdreg/pipeline.hpp"
#include "bdreg/synth.hpp"

namespace bdreg {

#ifndef BDREG_VERSION
#define BDREG_VERSION "0.1.0"
#endif

/// Core version; foreign-language bindings report the same string.
inline constexpr const char* version() noexcept { return BDREG_VERSION; }

}  // namespace bdreg
