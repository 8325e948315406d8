#include "misinfo/types.hpp"

#include <algorithm>
#include <cctype>

#include "misinfo/error.hpp"

namespace misinfo {

namespace {
std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}
}  // namespace

std::optional<Label> parse_label(std::string_view s) {
    const auto l = lower(s);
    if (l == "fake") return Label::Fake;
    if (l == "real") return Label::Real;
    return std::nullopt;
}

std::string_view to_string(BodyMode m) {
    return m == BodyMode::WithBody ? "with_body" : "without_body";
}

BodyMode parse_body_mode(std::string_view s) {
    const auto l = lower(s);
    if (l == "with_body" || l == "withbody") return BodyMode::WithBody;
    if (l == "without_body" || l == "withoutbody") return BodyMode::WithoutBody;
    throw ValidationError("unknown body mode: " + std::string(s));
}

}  // namespace misinfo
