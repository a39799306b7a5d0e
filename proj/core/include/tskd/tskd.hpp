#pragma once

#include "tskd/data.hpp"
#include "tskd/distill.hpp"
#include "tskd/expansion.hpp"
#include "tskd/fuzzy.hpp"
#include "tskd/harness.hpp"
#include "tskd/metrics.hpp"
#include "tskd/objective.hpp"
#include "tskd/readout.hpp"
#include "tskd/rng.hpp"
#include "tskd/serialize.hpp"
#include "tskd/student.hpp"
#include "tskd/teacher.hpp"
#include "tskd/types.hpp"
