#pragma once

#include "divforge/curvebundle.hpp"
#include "divforge/integer.hpp"
#include "divforge/linsys.hpp"
#include "divforge/picard.hpp"
#include "divforge/ruled.hpp"
#include "divforge/singularities.hpp"

#include "divforge/dsl/ast.hpp"
#include "divforge/dsl/evaluator.hpp"
#include "divforge/dsl/parser.hpp"
#include "divforge/dsl/printer.hpp"
#include "divforge/dsl/report.hpp"
