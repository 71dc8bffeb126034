#pragma once

#include "genreg/association.hpp"
#include "genreg/dataset.hpp"
#include "genreg/errors.hpp"
#include "genreg/ga.hpp"
#include "genreg/gic.hpp"
#include "genreg/inference.hpp"
#include "genreg/init.hpp"
#include "genreg/io.hpp"
#include "genreg/least_squares.hpp"
#include "genreg/markov.hpp"
#include "genreg/model_mask.hpp"
#include "genreg/rng.hpp"
#include "genreg/schema.hpp"
#include "genreg/simulate.hpp"
#include "genreg/stats.hpp"
