#pragma once

#include "fracgrad/config.hpp"
#include "fracgrad/content.hpp"
#include "fracgrad/error.hpp"
#include "fracgrad/fft.hpp"
#include "fracgrad/field_io.hpp"
#include "fracgrad/fields.hpp"
#include "fracgrad/kernels.hpp"
#include "fracgrad/maximal.hpp"
#include "fracgrad/norms.hpp"
#include "fracgrad/potentials.hpp"
#include "fracgrad/quadrature.hpp"
#include "fracgrad/report.hpp"
#include "fracgrad/shapes.hpp"
#include "fracgrad/suite.hpp"
#include "fracgrad/verify.hpp"
