#pragma once

#include "repcount/bigint.hpp"
#include "repcount/circle.hpp"
#include "repcount/densities.hpp"
#include "repcount/enumeration.hpp"
#include "repcount/errors.hpp"
#include "repcount/expand.hpp"
#include "repcount/form.hpp"
#include "repcount/multi_index.hpp"
#include "repcount/polynomial.hpp"
#include "repcount/psi.hpp"
#include "repcount/residues.hpp"
#include "repcount/rng.hpp"
#include "repcount/snf.hpp"
