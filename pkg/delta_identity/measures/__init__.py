"""Delta measures on hyperplane arrangements and their divergence diagnostics."""
