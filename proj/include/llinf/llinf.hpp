#ifndef LLINF_LLINF_HPP
#define LLINF_LLINF_HPP

#include "llinf/term.hpp"
#include "llinf/parse.hpp"
#include "llinf/print.hpp"
#include "llinf/wellform.hpp"
#include "llinf/reduction.hpp"
#include "llinf/metrics.hpp"
#include "llinf/generate.hpp"
#include "llinf/properties.hpp"
#include "llinf/lambda_infty.hpp"
#include "llinf/encodings.hpp"

#endif
