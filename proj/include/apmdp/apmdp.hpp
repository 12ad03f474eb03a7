#pragma once

#include "apmdp/error.hpp"
#include "apmdp/ltl.hpp"
#include "apmdp/parser.hpp"
#include "apmdp/boolean.hpp"
#include "apmdp/facts.hpp"
#include "apmdp/automaton.hpp"
#include "apmdp/world.hpp"
#include "apmdp/world_io.hpp"
#include "apmdp/mdp.hpp"
#include "apmdp/subproblem.hpp"
#include "apmdp/product.hpp"
#include "apmdp/planner.hpp"
#include "apmdp/plan_io.hpp"
#include "apmdp/bench.hpp"
