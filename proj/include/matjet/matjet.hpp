#pragma once

#include "matjet/calculus.hpp"
#include "matjet/errors.hpp"
#include "matjet/expr.hpp"
#include "matjet/family.hpp"
#include "matjet/hermite.hpp"
#include "matjet/io.hpp"
#include "matjet/jet.hpp"
#include "matjet/jet_eval.hpp"
#include "matjet/matrix_tuple.hpp"
