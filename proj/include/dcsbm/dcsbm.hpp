#pragma once

#include "dcsbm/counterexamples.hpp"
#include "dcsbm/equivalence.hpp"
#include "dcsbm/error.hpp"
#include "dcsbm/model.hpp"
#include "dcsbm/partitions.hpp"
#include "dcsbm/recovery.hpp"
#include "dcsbm/sampler.hpp"
