#pragma once

#include "tieboard/board.hpp"
#include "tieboard/catalog.hpp"
#include "tieboard/collab.hpp"
#include "tieboard/engine.hpp"
#include "tieboard/error.hpp"
#include "tieboard/geometry.hpp"
#include "tieboard/glow.hpp"
#include "tieboard/json_io.hpp"
#include "tieboard/pattern.hpp"
#include "tieboard/sensing.hpp"
#include "tieboard/session.hpp"
#include "tieboard/server.hpp"
