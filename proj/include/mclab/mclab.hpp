#pragma once

#include "mclab/types.hpp"
#include "mclab/refmachine.hpp"
#include "mclab/enumeration.hpp"
#include "mclab/complexity.hpp"
#include "mclab/kstar.hpp"
#include "mclab/measures.hpp"
#include "mclab/report.hpp"
#include "mclab/bounds.hpp"
#include "mclab/nu7.hpp"
#include "mclab/experiment.hpp"
