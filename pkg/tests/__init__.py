"""Test package marker to avoid module name collisions."""
