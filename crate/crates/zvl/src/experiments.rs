//! Scenario runners (in progress).
