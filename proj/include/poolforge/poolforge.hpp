#pragma once

/// @file poolforge.hpp
/// @brief Convenience header pulling in the whole library.

#include <poolforge/complexity.hpp>
#include <poolforge/core.hpp>
#include <poolforge/dataset.hpp>
#include <poolforge/diversity.hpp>
#include <poolforge/dynsel.hpp>
#include <poolforge/experiment.hpp>
#include <poolforge/fetch.hpp>
#include <poolforge/learner.hpp>
#include <poolforge/metricsel.hpp>
#include <poolforge/moga.hpp>
#include <poolforge/nsga2.hpp>
#include <poolforge/stats.hpp>
#include <poolforge/synthetic.hpp>
