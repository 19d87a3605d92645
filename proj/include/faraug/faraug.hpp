// faraug/faraug.hpp

// Copyright 2026  The faraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "faraug/audio.hpp"
#include "faraug/augmentor.hpp"
#include "faraug/classical_aug.hpp"
#include "faraug/codec.hpp"
#include "faraug/config.hpp"
#include "faraug/embedder.hpp"
#include "faraug/error.hpp"
#include "faraug/features.hpp"
#include "faraug/manifest.hpp"
#include "faraug/remote_codec.hpp"
#include "faraug/report.hpp"
#include "faraug/rt60.hpp"
#include "faraug/scoring.hpp"
#include "faraug/toy_codec.hpp"
