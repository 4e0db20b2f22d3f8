class GraphParseError(ValueError):
    "The input could not be read in the stated format"


class GraphValidationError(ValueError):
    "The input was read but does not describe a usable graph"
