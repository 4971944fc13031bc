// SPDX-License-Identifier: Apache-2.0
//
// Convenience umbrella header.
#pragma once

#include "quadrec/evaluation.hpp"
#include "quadrec/io.hpp"
#include "quadrec/miner.hpp"
#include "quadrec/model.hpp"
#include "quadrec/oracle.hpp"
#include "quadrec/recommend.hpp"
