"""Package marker for shared configuration."""
