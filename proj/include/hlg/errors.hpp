#pragma once

#include <stdexcept>
#include <string>

namespace hlg {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A node insert referenced an id that is not in the graph.
class DanglingReference : public Error {
public:
    using Error::Error;
};

class NotAStatement : public Error {
public:
    using Error::Error;
};

class NotATopic : public Error {
public:
    using Error::Error;
};

// Persisted store was written by an incompatible format version.
class VersionMismatch : public Error {
public:
    using Error::Error;
};

// Persisted store failed a checksum or structural integrity check.
class CorruptFile : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class MissingEmbedding : public Error {
public:
    using Error::Error;
};

class EmptyDocument : public Error {
public:
    using Error::Error;
};

// Wraps an extractor error with the document id / chunk ordinal it occurred at.
class ExtractorFailure : public Error {
public:
    using Error::Error;
};

// Invalid configuration value (zero k, tau out of range, unknown pipeline...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Remote provider transport failure after retries.
class ProviderError : public Error {
public:
    using Error::Error;
};

// Remote provider returned a response with the wrong shape.
class ProviderShapeError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

class EmptyGold : public Error {
public:
    using Error::Error;
};

// Corpus cannot yield cross-document topics for a seed.
class InsufficientDiversity : public Error {
public:
    using Error::Error;
};

// Selected chunks span fewer than the required number of sources.
class InsufficientSources : public Error {
public:
    using Error::Error;
};

// Mutation attempted on a frozen graph.
class FrozenGraph : public Error {
public:
    using Error::Error;
};

} // namespace hlg
