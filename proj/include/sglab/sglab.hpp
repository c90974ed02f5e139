#pragma once

#include "core.hpp"
#include "exponential.hpp"
#include "markov.hpp"
#include "prob.hpp"
#include "report.hpp"
#include "resolvent.hpp"
#include "rng.hpp"
#include "semigroup.hpp"
#include "seminorm.hpp"
#include "yosida.hpp"
