#pragma once

#include "qdurrmeyer/errors.hpp"
#include "qdurrmeyer/scalar.hpp"
#include "qdurrmeyer/context.hpp"
#include "qdurrmeyer/polynomial.hpp"
#include "qdurrmeyer/qcore.hpp"
#include "qdurrmeyer/operators.hpp"
#include "qdurrmeyer/moments.hpp"
#include "qdurrmeyer/asymptotics.hpp"
