"""Path data, models, centrality measures and the ranking experiment."""
