#pragma once

#include "wfit/data_io.hpp"
#include "wfit/datasets.hpp"
#include "wfit/distributions.hpp"
#include "wfit/errors.hpp"
#include "wfit/estimation.hpp"
#include "wfit/model_selection.hpp"
#include "wfit/moments.hpp"
#include "wfit/nelder_mead.hpp"
#include "wfit/prediction.hpp"
#include "wfit/resampling.hpp"
#include "wfit/rng.hpp"
#include "wfit/sample.hpp"
#include "wfit/special_functions.hpp"
