#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace misinfo {

/// Binary class used everywhere a tweet or statement is labeled.
/// Fake is the positive class for all metrics.
enum class Label { Fake, Real };

inline constexpr std::string_view to_string(Label l) { return l == Label::Fake ? "fake" : "real"; }

std::optional<Label> parse_label(std::string_view s);

/// How supporting statements were ingested: title only, or title + claim + body.
enum class BodyMode { WithoutBody, WithBody };

std::string_view to_string(BodyMode m);
BodyMode parse_body_mode(std::string_view s);

}  // namespace misinfo
