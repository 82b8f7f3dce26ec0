#pragma once

#include "recur/estimators.hpp"
#include "recur/io.hpp"
#include "recur/pattern_recognition.hpp"
#include "recur/processes.hpp"
#include "recur/quantization.hpp"
#include "recur/recurrence.hpp"
#include "recur/rng.hpp"
#include "recur/verification.hpp"
#include "recur/version.hpp"
