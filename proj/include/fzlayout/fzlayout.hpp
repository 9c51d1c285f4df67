#pragma once

#include "fzlayout/cli.hpp"
#include "fzlayout/edge_list.hpp"
#include "fzlayout/errors.hpp"
#include "fzlayout/force_models.hpp"
#include "fzlayout/fuzzy_multilevel.hpp"
#include "fzlayout/geometry.hpp"
#include "fzlayout/graph.hpp"
#include "fzlayout/io.hpp"
#include "fzlayout/multilevel.hpp"
#include "fzlayout/optimizer.hpp"
#include "fzlayout/parallel.hpp"
#include "fzlayout/partition_multilevel.hpp"
#include "fzlayout/pipeline.hpp"
#include "fzlayout/random.hpp"
#include "fzlayout/refinement.hpp"
