#pragma once

#include "tfrcorr/analytics.hpp"
#include "tfrcorr/apl.hpp"
#include "tfrcorr/correlation_model.hpp"
#include "tfrcorr/domain.hpp"
#include "tfrcorr/empirical_correlation.hpp"
#include "tfrcorr/errors.hpp"
#include "tfrcorr/io.hpp"
#include "tfrcorr/nelder_mead.hpp"
#include "tfrcorr/phase_model.hpp"
#include "tfrcorr/psd_repair.hpp"
#include "tfrcorr/simulation.hpp"
