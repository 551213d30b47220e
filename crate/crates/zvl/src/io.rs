//! Config, CSV and manifest I/O (in progress).
