#pragma once

#include "eurlab/descent.hpp"
#include "eurlab/entropy.hpp"
#include "eurlab/error.hpp"
#include "eurlab/minimizer.hpp"
#include "eurlab/optstates.hpp"
#include "eurlab/povmsim.hpp"
#include "eurlab/qstate.hpp"
#include "eurlab/random.hpp"
#include "eurlab/serialize.hpp"
#include "eurlab/version.hpp"
