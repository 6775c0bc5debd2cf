#pragma once

#include "halmos/algebra.hpp"
#include "halmos/algebra_io.hpp"
#include "halmos/analysis.hpp"
#include "halmos/config.hpp"
#include "halmos/errors.hpp"
#include "halmos/formula.hpp"
#include "halmos/galois.hpp"
#include "halmos/parse.hpp"
#include "halmos/pointset.hpp"
#include "halmos/pool.hpp"
#include "halmos/semantics.hpp"
#include "halmos/term.hpp"
