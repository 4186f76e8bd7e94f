#pragma once

#include <relkin/errors.hpp>
#include <relkin/vec.hpp>
#include <relkin/minkowski.hpp>
#include <relkin/geometry.hpp>
#include <relkin/quadrature.hpp>
#include <relkin/kernels.hpp>
#include <relkin/equilibrium.hpp>
#include <relkin/test_functions.hpp>
#include <relkin/volume.hpp>
#include <relkin/operator.hpp>
#include <relkin/linearized.hpp>
#include <relkin/norms.hpp>
#include <relkin/diagnostics.hpp>
#include <relkin/config.hpp>
#include <relkin/report.hpp>
