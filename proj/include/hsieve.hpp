#pragma once

#include "hsieve/characters.hpp"
#include "hsieve/errors.hpp"
#include "hsieve/group.hpp"
#include "hsieve/group_spec.hpp"
#include "hsieve/harmonics.hpp"
#include "hsieve/kickback.hpp"
#include "hsieve/linalg.hpp"
#include "hsieve/multiregister.hpp"
#include "hsieve/permutation.hpp"
#include "hsieve/representations.hpp"
