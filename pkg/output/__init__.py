"""Rendering of centrality scores, experiment reports and model files."""
