#pragma once

// Umbrella header. service.hpp is left out because it pulls in the HTTP
// server; include it directly where needed.

#include "visim/assessment.hpp"
#include "visim/base64.hpp"
#include "visim/blur.hpp"
#include "visim/color.hpp"
#include "visim/context.hpp"
#include "visim/frame.hpp"
#include "visim/gaze.hpp"
#include "visim/image_io.hpp"
#include "visim/mip.hpp"
#include "visim/noise.hpp"
#include "visim/pipeline.hpp"
#include "visim/presets.hpp"
#include "visim/profiles.hpp"
#include "visim/request.hpp"
#include "visim/schema.hpp"
#include "visim/symptom_config.hpp"
#include "visim/symptoms.hpp"
