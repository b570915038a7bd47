#pragma once

#include "earl/corpus.hpp"
#include "earl/document.hpp"
#include "earl/error.hpp"
#include "earl/fusion.hpp"
#include "earl/markers.hpp"
#include "earl/model.hpp"
#include "earl/needs.hpp"
#include "earl/stream.hpp"
