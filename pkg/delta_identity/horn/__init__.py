"""Horn-problem application: the joint density of characteristic-polynomial coefficients of A + R B R^T."""
