#pragma once

// Everything except the HTTP server and CLI (which pull in extra dependencies).

#include "fmit/compare.hpp"
#include "fmit/json.hpp"
#include "fmit/logic.hpp"
#include "fmit/merge.hpp"
#include "fmit/model.hpp"
#include "fmit/report.hpp"
#include "fmit/session.hpp"
#include "fmit/similarity.hpp"
#include "fmit/xml.hpp"
