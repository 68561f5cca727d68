#pragma once

#include "frameforge/frame.hpp"

#include <json.hpp>

#include <string>

namespace frameforge {

using json = nlohmann::json;

Frame frame_from_json(const json& j);
// Coordinates and weights printed with 17 significant digits.
std::string frame_to_json_text(const Frame& f);

Frame load_frame(const std::string& path);
void save_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

std::string fmt17(double v);
json bounds_json(const FrameBounds& b);

}  // namespace frameforge
