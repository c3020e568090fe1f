#pragma once

#include <stdexcept>
#include <string>

namespace biovoice {

// Base class for all library errors; catch this to handle any domain failure.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define BIOVOICE_ERROR_TYPE(Name)                                         \
    struct Name : Error {                                                  \
        explicit Name(const std::string& msg = #Name) : Error(msg) {}      \
    }

// Session input parsing.
BIOVOICE_ERROR_TYPE(MalformedHeader);
BIOVOICE_ERROR_TYPE(NonFiniteSample);
BIOVOICE_ERROR_TYPE(EmptyTrack);
BIOVOICE_ERROR_TYPE(UnsupportedEncoding);
BIOVOICE_ERROR_TYPE(CorruptContainer);
BIOVOICE_ERROR_TYPE(RangeViolation);
BIOVOICE_ERROR_TYPE(NonMonotoneTimestamps);
BIOVOICE_ERROR_TYPE(WindowOutsideTrack);
BIOVOICE_ERROR_TYPE(EmptyWindow);

// Signal processing.
BIOVOICE_ERROR_TYPE(SolverNonConvergence);
BIOVOICE_ERROR_TYPE(WindowTooShort);
BIOVOICE_ERROR_TYPE(NyquistViolation);
BIOVOICE_ERROR_TYPE(SignalTooShort);
BIOVOICE_ERROR_TYPE(ClipTooShort);

// Labeling.
BIOVOICE_ERROR_TYPE(EmptyCalibration);
BIOVOICE_ERROR_TYPE(DegenerateInput);

// Machine learning.
BIOVOICE_ERROR_TYPE(EmptyMatrix);
BIOVOICE_ERROR_TYPE(MinorityTooSmall);
BIOVOICE_ERROR_TYPE(NoCompleteVectors);
BIOVOICE_ERROR_TYPE(SingleClassTraining);
BIOVOICE_ERROR_TYPE(NonFiniteFeature);

// Evaluation and reporting.
BIOVOICE_ERROR_TYPE(ClassTooSmall);
BIOVOICE_ERROR_TYPE(LengthMismatch);
BIOVOICE_ERROR_TYPE(UnwritablePath);

#undef BIOVOICE_ERROR_TYPE

}  // namespace biovoice
