"""Independent evaluations of both sides of the delta-identity and their comparison."""
