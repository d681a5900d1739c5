#pragma once

#include "indefspec/config.hpp"
#include "indefspec/error.hpp"
#include "indefspec/fd_oracle.hpp"
#include "indefspec/modes.hpp"
#include "indefspec/numerics.hpp"
#include "indefspec/secular.hpp"
#include "indefspec/spectrum.hpp"
#include "indefspec/validation.hpp"
