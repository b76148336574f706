#pragma once

#include <stdexcept>
#include <string>

namespace frap {

/// Base class for all library errors. `kind()` returns a stable identifier
/// (e.g. "WrongAccessMode") that the CLI prints and tests match on.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define FRAP_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                        \
    public:                                                            \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

FRAP_DEFINE_ERROR(WrongAccessMode);
FRAP_DEFINE_ERROR(TerminalQuery);
FRAP_DEFINE_ERROR(EpisodeEnded);
FRAP_DEFINE_ERROR(ParseError);
FRAP_DEFINE_ERROR(ValidationError);
FRAP_DEFINE_ERROR(InvalidLayout);
FRAP_DEFINE_ERROR(NotOnFrontier);
FRAP_DEFINE_ERROR(NoVisitedChildren);
FRAP_DEFINE_ERROR(UnsupportedInit);
FRAP_DEFINE_ERROR(MissingHeuristicEntry);
FRAP_DEFINE_ERROR(MissingChild);
FRAP_DEFINE_ERROR(DistributionRequired);
FRAP_DEFINE_ERROR(UnvisitedPair);
FRAP_DEFINE_ERROR(ConfigError);
FRAP_DEFINE_ERROR(UnknownPreset);
FRAP_DEFINE_ERROR(NonConvergent);
FRAP_DEFINE_ERROR(MissingReturns);

#undef FRAP_DEFINE_ERROR

} // namespace frap
