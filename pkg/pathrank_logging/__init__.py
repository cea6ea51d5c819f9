"""Package marker for logging utilities and the error hierarchy."""
