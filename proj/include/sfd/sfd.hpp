#ifndef SFD_SFD_HPP
#define SFD_SFD_HPP

// Umbrella header for the solar filament detection library.

#include "sfd/acwe.hpp"
#include "sfd/baselines.hpp"
#include "sfd/config_json.hpp"
#include "sfd/disk.hpp"
#include "sfd/error.hpp"
#include "sfd/eval.hpp"
#include "sfd/image.hpp"
#include "sfd/image_io.hpp"
#include "sfd/pipeline.hpp"
#include "sfd/postprocess.hpp"
#include "sfd/preprocess.hpp"
#include "sfd/synth.hpp"

#endif
