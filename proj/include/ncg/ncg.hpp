#pragma once

// Umbrella header: the whole library without the CLI layer.

#include "ncg/config.hpp"
#include "ncg/scalar.hpp"
#include "ncg/matrix.hpp"
#include "ncg/algebra.hpp"
#include "ncg/ngroup.hpp"
#include "ncg/tensor.hpp"
#include "ncg/cyclic.hpp"
#include "ncg/chern.hpp"
#include "ncg/group.hpp"
#include "ncg/lefschetz.hpp"
#include "ncg/random.hpp"
#include "ncg/io.hpp"
#include "ncg/verify.hpp"
