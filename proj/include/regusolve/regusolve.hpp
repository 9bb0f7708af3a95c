#pragma once

#include "regusolve/bench.hpp"
#include "regusolve/csv.hpp"
#include "regusolve/gsvdreg.hpp"
#include "regusolve/matcore.hpp"
#include "regusolve/paramsel.hpp"
#include "regusolve/problems.hpp"
#include "regusolve/random.hpp"
#include "regusolve/rsvd.hpp"
#include "regusolve/transform.hpp"
