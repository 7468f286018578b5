#pragma once

#include "hmod/core.hpp"
#include "hmod/algebra.hpp"
#include "hmod/module.hpp"
#include "hmod/report.hpp"
#include "hmod/random.hpp"
#include "hmod/factorization.hpp"
#include "hmod/frames.hpp"
#include "hmod/frame_sums.hpp"
#include "hmod/oracles.hpp"
#include "hmod/io.hpp"
#include "hmod/verify.hpp"
