#ifndef MPCS_MPCS_HPP
#define MPCS_MPCS_HPP

#include "mpcs/analysis.hpp"
#include "mpcs/criticality.hpp"
#include "mpcs/error.hpp"
#include "mpcs/generators.hpp"
#include "mpcs/graph.hpp"
#include "mpcs/graph_io.hpp"
#include "mpcs/leader_select.hpp"
#include "mpcs/spectral.hpp"
#include "mpcs/tree_rules.hpp"

#endif  // MPCS_MPCS_HPP
