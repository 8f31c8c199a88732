/// \file pctk.hpp
/// \brief Umbrella header.

#pragma once

#include "pctk/amg.hpp"
#include "pctk/csr.hpp"
#include "pctk/dense.hpp"
#include "pctk/fieldsplit.hpp"
#include "pctk/ilu.hpp"
#include "pctk/layout.hpp"
#include "pctk/mtx_io.hpp"
#include "pctk/options.hpp"
#include "pctk/pc.hpp"
#include "pctk/pc_factory.hpp"
#include "pctk/pcd.hpp"
#include "pctk/problems.hpp"
#include "pctk/report.hpp"
#include "pctk/solver.hpp"
